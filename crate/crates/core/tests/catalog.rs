//! Closed-form catalog transforms against the numerical transform.

use bvfourier::catalog::{catalog, lookup, TransformOf};
use bvfourier::oscillatory::{pv_transform, transform};
use bvfourier::parser::parse_function;

const GRID: [f64; 6] = [-3.0, -1.0, -0.5, 0.5, 1.0, 3.0];

#[test]
fn closed_forms_match_on_grid() {
    let mut checked = 0;
    for e in catalog() {
        let Some(t) = e.transform else { continue };
        let f = e.function().unwrap();
        let f = match t.of {
            TransformOf::Function => f,
            TransformOf::Residual => f.subtract_asymptote().unwrap().0,
        };
        for s in GRID {
            let r = if f.odd_symmetry().is_some() {
                pv_transform(&f, s)
            } else {
                transform(&f, s, 1e-10)
            }
            .unwrap_or_else(|err| panic!("{} at s = {s}: {err}", e.name));
            let want = (t.eval)(s);
            assert!((r.value - want).norm() <= t.tol, "{} at s = {s}: {} vs {want}", e.name, r.value);
        }
        checked += 1;
    }
    assert!(checked >= 8, "{checked}");
}

#[test]
fn catalog_is_complete() {
    let names: Vec<&str> = catalog().iter().map(|e| e.name).collect();
    assert!(names.len() >= 10);
    for n in ["log-example", "cantor", "sgnlog", "sin-sqrt", "arctan", "poly-tanh", "pv-alpha-0.5", "pv-alpha-1.5", "heaviside", "sgn"] {
        assert!(names.contains(&n), "{n} missing");
    }
    assert!(lookup("pv-alpha-0.5").unwrap().function().unwrap().odd_symmetry().is_some_and(|o| o.center == 0.0));
}

#[test]
fn sources_round_trip() {
    // each entry's source parses, and evaluating twice gives the same values
    for e in catalog() {
        let f = parse_function(e.source).unwrap();
        let g = e.function().unwrap();
        for x in [-2.3, -0.7, 0.3, 1.1, 4.2] {
            assert_eq!(f.value(x).to_bits(), g.value(x).to_bits(), "{} at {x}", e.name);
        }
    }
}

#[test]
fn arctan_grammar_round_trip() {
    let f = parse_function("on (0,inf): atan(x) | on (-inf,0]: atan(x) tail+ limit tail- limit").unwrap();
    for x in [-5.0, -1.0, 0.0, 0.5, 7.0] {
        assert!((f.value(x) - f64::atan(x)).abs() < 1e-15);
    }
}

#[test]
fn malformed_definition_is_a_parse_error() {
    let err = parse_function("on (0,: x").unwrap_err();
    assert!(matches!(err, bvfourier::error::Error::Parse { .. }), "{err}");
}
