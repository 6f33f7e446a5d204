use kglab::commands::recognize;
use kglab::config::{parse_config, EvalPoint, List};
use kglab::output::{num, Body, Document, Report, Section, Table, Value};
use proptest::prelude::*;

fn key() -> impl Strategy<Value = String> {
    "[a-z_][a-z0-9_]{0,8}"
}

fn text() -> impl Strategy<Value = String> {
    "[ -~]{0,12}"
}

fn cell() -> impl Strategy<Value = String> {
    "[a-z0-9.+ -]{0,6}"
}

fn entries(depth: u32) -> BoxedStrategy<Vec<(String, Value)>> {
    let leaf = text().prop_map(Value::Scalar);
    let value = if depth == 0 {
        leaf.boxed()
    } else {
        prop_oneof![3 => leaf, 1 => entries(depth - 1).prop_map(Value::Nested)].boxed()
    };
    prop::collection::vec((key(), value), 0..4).boxed()
}

fn table() -> impl Strategy<Value = Table> {
    (1usize..4).prop_flat_map(|w| {
        (
            prop::collection::vec(key(), w),
            prop::collection::vec(prop::collection::vec(cell(), w), 0..4),
        )
            .prop_map(|(columns, rows)| Table { columns, rows })
    })
}

fn document() -> impl Strategy<Value = Document> {
    let section = ("[a-z_]{1,8}", prop_oneof![
        table().prop_map(Body::Table),
        entries(2).prop_map(|entries| Body::Report(Report { entries })),
    ])
        .prop_map(|(name, body)| Section { name, body });
    (
        prop::collection::vec((key(), "[ -~]{1,12}"), 0..4),
        prop::collection::vec(section, 0..4),
    )
        .prop_map(|(header, sections)| Document { header, sections })
}

proptest! {
    #[test]
    fn documents_round_trip(d in document()) {
        let text = d.emit();
        prop_assert_eq!(Document::parse(&text).unwrap(), d);
    }

    #[test]
    fn floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(num(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn lists_round_trip(v in prop::collection::vec(-1e6f64..1e6, 1..6)) {
        let l = List(v);
        prop_assert_eq!(l.to_string().parse::<List<f64>>().unwrap(), l);
    }

    #[test]
    fn eval_points_round_trip(a in -1000i64..1000, b in 1i64..50, c in -1000i64..1000, d in 1i64..50) {
        let p = EvalPoint { a: kg_lattice::algebra::rat(a, b), g3: kg_lattice::algebra::rat(c, d) };
        prop_assert_eq!(p.to_string().parse::<EvalPoint>().unwrap(), p);
    }

    #[test]
    fn small_fractions_are_recognized(p in -5000i64..5000, q in 1i64..5000) {
        let x = p as f64 / q as f64;
        prop_assert_eq!(recognize(x), Some(kg_lattice::algebra::rat(p, q)));
    }

    #[test]
    fn config_lines_parse(pairs in prop::collection::btree_map(key(), "[!-~]{1,10}", 0..5)) {
        let text: String = pairs.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
        prop_assert_eq!(parse_config(&text).unwrap(), pairs);
    }
}

#[test]
fn recognition_limits() {
    assert_eq!(recognize(0.004882812500000004), Some(kg_lattice::algebra::rat(5, 1024)));
    assert_eq!(recognize(std::f64::consts::PI), None);
    assert_eq!(recognize(f64::NAN), None);
}
