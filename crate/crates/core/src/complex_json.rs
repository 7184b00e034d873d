//! `{"re": .., "im": ..}` encoding for complex numbers.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
struct Repr {
    re: f64,
    #[serde(default)]
    im: f64,
}

pub fn serialize<S: Serializer>(c: &C64, s: S) -> Result<S::Ok, S::Error> {
    Repr { re: c.re, im: c.im }.serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
    let r = Repr::deserialize(d)?;
    Ok(C64::new(r.re, r.im))
}
