//! Rationals serialize as their `p/q` strings so exact values survive JSON
//! and CSV round trips.

use serde::Serializer;

use crate::Rational;

pub fn one<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

pub fn seq<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|q| q.to_string()))
}
