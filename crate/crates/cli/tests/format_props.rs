//! Property test: the 17-significant-digit csv5 encoding round-trips every
//! finite double bit-exactly.

use proptest::prelude::*;

fn finite_f64() -> impl Strategy<Value = f64> {
    prop::num::f64::ANY.prop_filter("finite", |v| v.is_finite())
}

proptest! {
    #[test]
    fn csv5_number_roundtrip(v in finite_f64()) {
        let s = format!("{v:.16e}");
        let back: f64 = s.parse().unwrap();
        prop_assert_eq!(v.to_bits(), back.to_bits());
    }

    #[test]
    fn csv5_row_roundtrip(x in finite_f64(), y in finite_f64(), f in prop::array::uniform5(finite_f64())) {
        let line = [x, y, f[0], f[1], f[2], f[3], f[4]]
            .iter()
            .map(|v| format!("{v:.16e}"))
            .collect::<Vec<_>>()
            .join(",");
        let parsed: Vec<f64> = line.split(',').map(|p| p.parse().unwrap()).collect();
        prop_assert_eq!(parsed.len(), 7);
        for (a, b) in [x, y, f[0], f[1], f[2], f[3], f[4]].iter().zip(parsed.iter()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
