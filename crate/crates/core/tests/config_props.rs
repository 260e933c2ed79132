use proptest::prelude::*;
use rkbs::config::{ActionSpec, GraphSpec, OrbitSpec, OutputFormat, SessionConfig, ThetaSpec};
use rkbs::kgraph::ThetaKind;

fn action() -> impl Strategy<Value = ActionSpec> {
    prop_oneof![
        (1usize..7, -9i64..9).prop_map(|(n, m)| ActionSpec::Odometer { n, m }),
        prop::collection::vec((1usize..4, prop::collection::vec(-5i64..5, 3)), 1..3).prop_map(|orbits| {
            ActionSpec::Gbs {
                orbits: orbits
                    .into_iter()
                    .map(|(n, rho)| OrbitSpec { n, rho: rho[..n].to_vec() })
                    .collect(),
            }
        }),
        prop::collection::vec(1usize..6, 1..4).prop_map(|sizes| ActionSpec::ProductOdometers { sizes }),
        prop::collection::vec(-6i64..6, 1..4).prop_map(|m| ActionSpec::LambdaOne { m }),
        (prop::collection::vec(prop::collection::vec(0u32..4, 2), 1..3)).prop_map(|sigma| ActionSpec::Explicit {
            rho: sigma.iter().map(|w| w.iter().map(|&x| x as i64 - 1).collect()).collect(),
            sigma,
        }),
    ]
}

fn graph() -> impl Strategy<Value = Option<GraphSpec>> {
    let theta = prop_oneof![
        Just(ThetaSpec::Named(ThetaKind::Trivial)),
        Just(ThetaSpec::Named(ThetaKind::Division)),
        Just(ThetaSpec::Named(ThetaKind::Flip)),
        prop::collection::vec((0u32..3, 0u32..3), 4).prop_map(|t| ThetaSpec::Tables { tables: vec![t] }),
    ];
    prop::option::of((prop::collection::vec(1usize..5, 1..4), theta).prop_map(|(sizes, theta)| GraphSpec {
        k: sizes.len(),
        sizes,
        theta,
    }))
}

proptest! {
    #[test]
    fn emit_then_parse_is_identity(
        action in action(),
        graph in graph(),
        cap in 1u64..10_000_000,
        depth in 0u32..6,
        g_bound in 0i64..64,
        seed in any::<u64>(),
        json in any::<bool>(),
    ) {
        let cfg = SessionConfig {
            graph,
            action,
            cap,
            depth,
            g_bound,
            seed,
            format: if json { OutputFormat::Json } else { OutputFormat::Text },
        };
        let text = cfg.to_json();
        let back = SessionConfig::from_json(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_json(), text);
    }
}
