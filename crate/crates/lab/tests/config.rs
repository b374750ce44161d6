use gdnls_lab::config::{ConfigError, Experiment, ExperimentConfig, Key};
use gdnls_lab::experiments::Plan;
use proptest::prelude::*;

#[test]
fn unknown_key_reports_line() {
    let err = ExperimentConfig::parse("experiment = evolve\n\nbogus = 1\n", None).unwrap_err();
    assert_eq!(
        err,
        ConfigError::Syntax {
            line: 3,
            message: "unknown key `bogus`".into()
        }
    );
}

#[test]
fn key_of_other_experiment_rejected() {
    let err = ExperimentConfig::parse("experiment = gauge-check\nsigma = 2\n", None).unwrap_err();
    assert_eq!(err.field_name(), Some("sigma"));
    assert!(err.to_string().starts_with("line 2:"), "{err}");
}

#[test]
fn unknown_experiment_lists_names() {
    let msg = ExperimentConfig::parse("experiment = nope\n", None)
        .unwrap_err()
        .to_string();
    for e in Experiment::ALL {
        assert!(msg.contains(e.name()), "{msg}");
    }
}

#[test]
fn speed_outside_admissible_set() {
    let cfg = ExperimentConfig::parse(
        "experiment = evolve\ndatum = soliton\nomega = 1\nc = 2.5\n",
        None,
    )
    .unwrap();
    let err = Plan::from_config(&cfg).unwrap_err();
    assert_eq!(err.field_name(), Some("c"));
    let msg = err.to_string();
    assert!(
        msg.contains("line 4") && msg.contains("(-2 sqrt(omega), 2 sqrt(omega))"),
        "{msg}"
    );
}

#[test]
fn comments_and_inf() {
    let cfg = ExperimentConfig::parse(
        "# probe\nexperiment = ineq-probe # trailing\nprobe = strichartz\nq = inf\nr = 2\n",
        None,
    )
    .unwrap();
    assert_eq!(cfg.real(Key::Q, 0.0), f64::INFINITY);
    assert!(Plan::from_config(&cfg).is_ok());
}

fn value_for(key: Key) -> BoxedStrategy<String> {
    let real = prop_oneof![
        (-3.0f64..3.0).prop_map(|v| format!("{v:?}")),
        (1e-4f64..1e3).prop_map(|v| format!("{v:?}")),
        Just("0".to_string()),
        Just("-1".to_string()),
        Just("1e300".to_string()),
        Just("1e-300".to_string()),
    ];
    match key {
        Key::CGrid => prop::collection::vec(-3.0f64..3.0, 1..4)
            .prop_map(|v| {
                v.iter()
                    .map(|x| format!("{x:?}"))
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .boxed(),
        Key::NPoints | Key::Stride | Key::Count | Key::Members | Key::Pairs => {
            prop_oneof![0usize..40, Just(64usize), Just(1000), Just(1 << 30),]
                .prop_map(|v| v.to_string())
                .boxed()
        }
        Key::Seed => any::<u64>().prop_map(|v| v.to_string()).boxed(),
        Key::OutputPath => Just("x".to_string()).boxed(),
        Key::Q | Key::R | Key::P => prop_oneof![real, Just("inf".to_string())].boxed(),
        Key::Norm => prop::sample::select(vec!["l2", "h1", "pc", "critical"])
            .prop_map(String::from)
            .boxed(),
        Key::Equation => prop::sample::select(vec!["gdnls", "dnls", "linear"])
            .prop_map(String::from)
            .boxed(),
        Key::Datum => prop::sample::select(vec!["gaussian", "soliton"])
            .prop_map(String::from)
            .boxed(),
        Key::Probe => {
            prop::sample::select(vec!["all", "strichartz", "smoothing", "maximal", "leibniz"])
                .prop_map(String::from)
                .boxed()
        }
        _ => real.boxed(),
    }
}

fn random_config() -> impl Strategy<Value = ExperimentConfig> {
    prop::sample::select(Experiment::ALL.to_vec()).prop_flat_map(|e| {
        let entries: Vec<_> = e
            .keys()
            .iter()
            .map(|&k| prop::option::weighted(0.4, value_for(k)).prop_map(move |v| (k, v)))
            .collect();
        entries.prop_map(move |pairs| {
            let mut cfg = ExperimentConfig::new(e);
            for (k, v) in pairs {
                if let Some(v) = v {
                    cfg.set_raw(k, &v).expect("generated values parse");
                }
            }
            cfg
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn validation_never_panics_and_names_field(cfg in random_config()) {
        if let Err(e) = Plan::from_config(&cfg) {
            let field = e.field_name();
            prop_assert!(field.is_some(), "{e}");
            let field = field.unwrap();
            prop_assert!(
                cfg.experiment.keys().iter().any(|k| k.name() == field) || field == "experiment",
                "{field}: {e}"
            );
        }
    }

    #[test]
    fn normalized_round_trip(cfg in random_config()) {
        let text = cfg.to_normalized();
        let back = ExperimentConfig::parse(&text, None).unwrap();
        prop_assert_eq!(back.to_normalized(), text);
        prop_assert_eq!(back.entries().collect::<Vec<_>>(), cfg.entries().collect::<Vec<_>>());
    }
}
