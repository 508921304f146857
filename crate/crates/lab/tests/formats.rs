use proptest::prelude::*;

use pairsig::engine::{simulate_cell, SimulationConfig};
use pairsig::ingest::{paired_differences, read_long, read_wide_csv, write_wide_csv, ScoreMatrix};
use pairsig::specfile::{format_spec, parse_spec};
use pairsig::LabError;
use pairsig_core::distributions::{DistributionSpec, Shape};
use pairsig_core::montecarlo::TestKind;

fn matrices() -> impl Strategy<Value = ScoreMatrix> {
    (1usize..6, 1usize..30).prop_flat_map(|(systems, topics)| {
        prop::collection::vec(prop::collection::vec(-1e3f64..1e3, systems), topics).prop_map(
            move |scores| {
                ScoreMatrix::new(
                    "ndcg@10".into(),
                    (0..scores.len()).map(|t| format!("q{t}")).collect(),
                    (0..systems).map(|s| format!("run-{s}")).collect(),
                    scores,
                )
                .unwrap()
            },
        )
    })
}

fn specs() -> impl Strategy<Value = DistributionSpec> {
    let shape = prop_oneof![
        Just(Shape::Normal),
        (0.3f64..20.0).prop_map(|beta| Shape::Sgn { beta }),
        Just(Shape::Sgn {
            beta: f64::INFINITY
        }),
        (0.2f64..5.0, 0.3f64..3.0).prop_map(|(xi, nu)| Shape::Agn { xi, nu }),
        (-2.0f64..2.0, 0.0f64..0.24).prop_map(|(g, h)| Shape::Tgh { g, h }),
        (0.0f64..4.0).prop_map(|separation| Shape::BimodalMixture { separation }),
    ];
    (shape, -5.0f64..5.0, 1e-3f64..10.0)
        .prop_map(|(s, loc, scale)| DistributionSpec::new(s, loc, scale).unwrap())
}

proptest! {
    #[test]
    fn wide_csv_round_trips(m in matrices()) {
        let mut buf = Vec::new();
        write_wide_csv(&m, &mut buf).unwrap();
        prop_assert_eq!(read_wide_csv(buf.as_slice()).unwrap(), m);
    }

    #[test]
    fn long_text_matches_wide(m in matrices()) {
        let mut text = String::new();
        for (t, topic) in m.topics.iter().enumerate() {
            for (s, system) in m.systems.iter().enumerate() {
                text.push_str(&format!("{system}\t{topic}\t{}\n", m.scores[t][s]));
            }
        }
        let long = read_long(text.as_bytes()).unwrap();
        prop_assert_eq!(long.scores, m.scores);
        prop_assert_eq!(long.systems, m.systems);
    }

    #[test]
    fn spec_files_round_trip(spec in specs()) {
        prop_assert_eq!(parse_spec(&format_spec(&spec)).unwrap(), spec);
    }
}

#[test]
fn pairs_follow_column_order() {
    let text = "topic,a,b,c\n1,0.5,0.25,1\n2,0,1,0.5\n";
    let m = read_wide_csv(text.as_bytes()).unwrap();
    let pairs = paired_differences(&m).unwrap();
    let names: Vec<_> = pairs.iter().map(|p| format!("{}-{}", p.a, p.b)).collect();
    assert_eq!(names, ["a-b", "a-c", "b-c"]);
    assert_eq!(pairs[0].sample.values(), &[0.25, -1.0]);
    let one = read_wide_csv("topic,a\n1,0.5\n".as_bytes()).unwrap();
    assert!(matches!(
        paired_differences(&one),
        Err(LabError::InsufficientSystems(1))
    ));
}

#[test]
fn malformed_inputs() {
    assert!(matches!(
        read_long("a 1 0.5\na 1 0.6\n".as_bytes()),
        Err(LabError::Duplicate { line: 2, .. })
    ));
    assert!(matches!(
        read_long("a 1 nan-ish\n".as_bytes()),
        Err(LabError::Parse { line: 1, .. })
    ));
    assert!(matches!(
        read_wide_csv("topic,a,b\n1,0.5\n".as_bytes()),
        Err(LabError::Ragged { .. })
    ));
    assert!(matches!(
        read_wide_csv("# metric=AP\ntopic,a,b\n1,0.5,x\n".as_bytes()),
        Err(LabError::Parse { line: 3, .. })
    ));
}

#[test]
fn pooled_cells_alternate_components() {
    let null = DistributionSpec::new(Shape::Normal, 0.0, 0.22).unwrap();
    let shifted = DistributionSpec::new(Shape::Normal, 10.0, 0.22).unwrap();
    let config = SimulationConfig {
        replicates: 1000,
        tests: vec![TestKind::T],
        workers: Some(2),
        ..SimulationConfig::default()
    };
    let t = simulate_cell(&[null.clone(), shifted], 5, 42, &config).unwrap()[0];
    let alone = simulate_cell(std::slice::from_ref(&null), 5, 42, &config).unwrap()[0];
    assert_eq!(t.replicates, 1000);
    // Every odd replicate comes from the shifted component and rejects; the
    // even ones are the even replicates of the null cell on the same streams.
    assert!(t.rejections >= 500 && t.rejections < 540, "{t:?}");
    assert!(alone.rejections < 80);
    assert!(simulate_cell(&[], 5, 42, &config).is_err());
}
