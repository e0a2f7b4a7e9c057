mod support;

use hazbench::dsl::{parse_bundle, parse_feeder, serialize_bundle, serialize_feeder};
use proptest::prelude::*;
use support::*;

#[test]
fn corpus_model_round_trips() {
    let bundle = load_corpus();
    let text = serialize_bundle(&bundle);
    let again = parse_bundle(&text, "roundtrip.haz").unwrap_or_else(|e| panic!("{e}\n{text}"));
    assert_eq!(again, bundle);
    assert_eq!(serialize_bundle(&again), text);
}

#[test]
fn corpus_feeders_round_trip() {
    for name in ["reference.net", "two_bus.net"] {
        let feeder = parse_feeder(&read_corpus(name), name).unwrap();
        let text = serialize_feeder(&feeder);
        let again = parse_feeder(&text, name).unwrap_or_else(|e| panic!("{e}\n{text}"));
        assert_eq!(again, feeder, "{name}");
        assert_eq!(serialize_feeder(&again), text);
    }
}

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn text() -> impl Strategy<Value = String> {
    "[ -~\n]{0,24}"
}

fn number() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e6..1e6f64,
        (-1e-3..1e-3f64),
        (1u32..400).prop_map(|n| n as f64 / 10.0),
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
    ]
}

fn render(v: f64, style: u8) -> String {
    match style % 3 {
        0 => format!("{v}"),
        1 => format!("{v:e}"),
        _ => format!("{v:.12}"),
    }
}

prop_compose! {
    fn model_text()(
        losses in prop::collection::vec(text(), 1..4),
        hazards in prop::collection::vec((prop::option::of(text()), prop::collection::vec(0usize..4, 1..3)), 1..4),
        values in prop::collection::vec((number(), any::<u8>()), 1..5),
        title in text(),
        nominal in 100.0..400.0f64,
        tolerance in 0.01..0.5f64,
        delay in 0.0..5.0f64,
    ) -> String {
        let mut s = String::new();
        for (i, d) in losses.iter().enumerate() {
            s += &format!("loss L{} {}\n", i + 1, quote(d));
        }
        for (i, (desc, leads)) in hazards.iter().enumerate() {
            let desc = desc.as_deref().map(quote).unwrap_or_default();
            let leads: Vec<String> = leads.iter().map(|l| format!("L{}", l % losses.len() + 1)).collect();
            s += &format!("hazard H{} {desc} -> {}\n", i + 1, leads.join(" "));
        }
        let list: Vec<String> = values.iter().map(|(v, style)| render(*v, *style)).collect();
        s += &format!(
            "testspec TS-1 {{\n  from_scenario HS-1\n  title {}\n  vary d [{}] s\n  initial nominal {} V tolerance {} delay {} s\n}}\n",
            quote(&title),
            list.join(", "),
            render(nominal, 2),
            render(tolerance, 0),
            render(delay, 1),
        );
        s
    }
}

prop_compose! {
    fn feeder_text()(
        v0 in 100.0..400.0f64,
        loads in prop::collection::vec((number(), number(), 0.0..2.0f64, 0.0..2.0f64, any::<u8>()), 1..6),
        parents in prop::collection::vec(any::<prop::sample::Index>(), 6),
        bems in prop::collection::vec((any::<bool>(), 1.0..1e4f64, 0.0..1e4f64), 6),
    ) -> String {
        let mut s = format!("slack B0 {} V\n", render(v0, 0));
        for (i, (p, q, _, _, style)) in loads.iter().enumerate() {
            s += &format!("bus B{} load {} {}\n", i + 1, render(*p, *style), render(*q, style / 3));
        }
        for (i, (_, _, r, x, style)) in loads.iter().enumerate() {
            let parent = parents[i].index(i + 1);
            s += &format!("line B{parent} B{} r {} x {}\n", i + 1, render(r + 1e-3, *style), render(*x, 0));
        }
        for (i, (on, q, pv)) in bems.iter().take(loads.len()).enumerate() {
            if *on {
                s += &format!("bems B{} qmax {} pv {}\n", i + 1, render(*q, 1), render(*pv, 0));
            }
        }
        s
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn model_parse_serialize_parse_is_identity(src in model_text()) {
        let first = parse_bundle(&src, "gen.haz").unwrap();
        let text = serialize_bundle(&first);
        let second = parse_bundle(&text, "gen.haz").unwrap();
        prop_assert_eq!(&second, &first);
        prop_assert_eq!(serialize_bundle(&second), text);
    }

    #[test]
    fn feeder_parse_serialize_parse_is_identity(src in feeder_text()) {
        let first = parse_feeder(&src, "gen.net").unwrap();
        let text = serialize_feeder(&first);
        let second = parse_feeder(&text, "gen.net").unwrap();
        prop_assert_eq!(&second, &first);
        prop_assert_eq!(serialize_feeder(&second), text);
    }

    #[test]
    fn arbitrary_text_never_panics(src in "[ -~\n]{0,200}") {
        let _ = parse_bundle(&src, "junk.haz");
        let _ = parse_feeder(&src, "junk.net");
    }
}
