//! JSON encoding of exact geometry.
//!
//! Rationals are written as `"num/den"` strings (or `"num"` for integers).
//! Integer JSON numbers are accepted on input.

use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::geometry::{Line3, Point2, Point3};
use crate::poly::{Exps, TriPoly};
use crate::rational::{self, Rational};

#[derive(Deserialize)]
#[serde(untagged)]
enum Num {
    Int(i64),
    Str(String),
}

impl Num {
    fn into_rational<E: serde::de::Error>(self) -> Result<Rational, E> {
        match self {
            Num::Int(i) => Ok(rational::int(i)),
            Num::Str(s) => rational::parse(&s).map_err(E::custom),
        }
    }
}

fn rationals<'de, D: Deserializer<'de>, const N: usize>(d: D) -> Result<[Rational; N], D::Error> {
    let raw = Vec::<Num>::deserialize(d)?;
    if raw.len() != N {
        return Err(D::Error::invalid_length(raw.len(), &"a coordinate array of the right length"));
    }
    let v = raw.into_iter().map(Num::into_rational).collect::<Result<Vec<_>, _>>()?;
    Ok(v.try_into().expect("length checked"))
}

fn strings(xs: &[Rational]) -> Vec<String> {
    xs.iter().map(rational::format).collect()
}

impl Serialize for Point2 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        strings(&[self.x.clone(), self.y.clone()]).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, y] = rationals::<D, 2>(d)?;
        Ok(Point2::new(x, y))
    }
}

impl Serialize for Point3 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        strings(&self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point3 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Point3(rationals::<D, 3>(d)?))
    }
}

impl Serialize for Line3 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Line3", 2)?;
        st.serialize_field("base", self.base())?;
        st.serialize_field("dir", self.dir())?;
        st.end()
    }
}

#[derive(Deserialize)]
struct LineRepr {
    base: Point3,
    dir: Point3,
}

impl<'de> Deserialize<'de> for Line3 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = LineRepr::deserialize(d)?;
        Line3::new(r.base, r.dir).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct Term(u32, u32, u32, #[serde(with = "rational::serde_str")] Rational);

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    terms: Vec<Term>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    factors: Option<Vec<PolyRepr>>,
}

impl PolyRepr {
    fn of(p: &TriPoly) -> PolyRepr {
        PolyRepr {
            terms: p.terms().iter().map(|(e, c)| Term(e[0], e[1], e[2], c.clone())).collect(),
            factors: p.factors().map(|fs| fs.iter().map(PolyRepr::of).collect()),
        }
    }

    fn build(self) -> TriPoly {
        match self.factors {
            Some(fs) => TriPoly::product(fs.into_iter().map(PolyRepr::build).collect()),
            None => TriPoly::from_terms(self.terms.into_iter().map(|Term(a, b, c, k)| ([a, b, c] as Exps, k))),
        }
    }
}

/// Terms are `[e1, e2, e3, "coef"]` in monomial order. A factored
/// polynomial also lists its factors; on input the factors win.
impl Serialize for TriPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyRepr::of(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for TriPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(PolyRepr::deserialize(d)?.build())
    }
}

/// Instance file contents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InstanceFile {
    /// A planar configuration.
    Points { points: Vec<Point2> },
    /// A point set in space.
    Points3d { points: Vec<Point3> },
    Lines { lines: Vec<Line3> },
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> crate::Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| crate::Error::Format(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: for<'de> Deserialize<'de>>(s: &str) -> crate::Result<T> {
    serde_json::from_str(s).map_err(|e| crate::Error::Format(e.to_string()))
}
