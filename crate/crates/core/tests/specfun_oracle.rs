use serde_json::Value;
use tangent_spde::specfun::{mittag_leffler, ml_kernel};

fn fixture() -> Value {
    serde_json::from_str(include_str!("fixtures/ml_reference.json")).unwrap()
}

fn num(v: &Value) -> f64 {
    match v {
        Value::String(s) => s.parse().unwrap(),
        other => other.as_f64().unwrap(),
    }
}

#[test]
fn mittag_leffler_matches_high_precision_reference() {
    let data = fixture();
    let cases = data["mittag_leffler"].as_array().unwrap();
    let mut worst_rel: f64 = 0.0;
    for case in cases {
        let (a, b, z) = (num(&case["a"]), num(&case["b"]), num(&case["z"]));
        let reference = num(&case["value"]);
        let value = mittag_leffler(a, b, z).unwrap_or_else(|e| panic!("E_{{{a},{b}}}({z}): {e}"));
        let err = (value - reference).abs();
        if z >= -20.0 {
            let rel = err / reference.abs();
            worst_rel = worst_rel.max(rel);
            assert!(
                rel <= 1e-10,
                "E_{{{a},{b}}}({z}) = {value}, reference {reference}"
            );
        } else {
            assert!(
                err <= 1e-12,
                "E_{{{a},{b}}}({z}) = {value}, reference {reference}"
            );
            assert!(err <= 1e-9 * reference.abs().max(1e-300) || reference == 0.0 || err <= 1e-15);
        }
    }
    assert!(worst_rel < 1e-10);
}

#[test]
fn kernel_matches_high_precision_reference() {
    let data = fixture();
    let k = &data["kernel"];
    let value = ml_kernel(num(&k["beta"]), num(&k["lambda"]), num(&k["t"])).unwrap();
    let reference = num(&k["value"]);
    assert!((value - reference).abs() <= 1e-10 * reference);
}
