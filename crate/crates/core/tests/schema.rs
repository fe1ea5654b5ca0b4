use num_complex::Complex64;
use schatten_lab::spaces::Symbol;

fn schema() -> serde_json::Value {
    serde_json::from_str(include_str!("../schema/symbol.schema.json")).unwrap()
}

#[test]
fn schema_lists_every_kind_the_library_writes() {
    let s = schema();
    let kinds: Vec<&str> = s["properties"]["kind"]["enum"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let symbols = [
        Symbol::monomial(3).unwrap(),
        Symbol::kernel_power(Complex64::new(0.5, 0.2), 1.5).unwrap(),
        Symbol::taylor(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)]).unwrap(),
        Symbol::loglog(),
        Symbol::lacunary(vec![0.5, 0.25], vec![2, 4], 2.0).unwrap(),
    ];
    for g in symbols {
        let doc: serde_json::Value = serde_json::from_str(&g.to_json()).unwrap();
        let kind = doc["kind"].as_str().unwrap();
        assert!(kinds.contains(&kind), "{kind}");
        let allowed = s["properties"].as_object().unwrap();
        for key in doc.as_object().unwrap().keys() {
            assert!(allowed.contains_key(key), "{key} not in schema");
        }
    }
}

#[test]
fn documented_examples_parse() {
    for text in [
        r#"{ "kind": "kernel_power", "params": { "a": [0.9, 0.0], "gamma": 1.0 }, "truncation": 1024 }"#,
        r#"{ "kind": "kernel_power", "params": { "a": 0.9, "gamma": 1.0 }, "truncation": 1024 }"#,
        r#"{ "kind": "taylor", "params": {}, "coeffs": [[0, 0], [1, 0], [0, 0.5]], "truncation": 3 }"#,
        r#"{ "kind": "monomial", "params": { "j": 4 }, "truncation": 5 }"#,
    ] {
        Symbol::from_json(text).unwrap();
    }
    assert!(Symbol::from_json(r#"{ "kind": "monomial", "params": {}, "truncation": 5 }"#).is_err());
    assert!(Symbol::from_json(r#"{ "kind": "monomial", "params": { "j": 4 }, "truncation": 5, "x": 1 }"#).is_err());
}
