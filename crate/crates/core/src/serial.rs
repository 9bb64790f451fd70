//! Serde helpers: big integers travel as decimal strings.

use serde::Serializer;

use crate::BigNat;

pub fn decimal<S: Serializer>(n: &BigNat, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(n)
}

pub fn opt_decimal<S: Serializer>(n: &Option<BigNat>, s: S) -> Result<S::Ok, S::Error> {
    match n {
        Some(n) => s.collect_str(n),
        None => s.serialize_none(),
    }
}

pub fn decimal_vec<S: Serializer>(v: &[BigNat], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}
