//! System descriptors such as `rotation:alpha=golden` or
//! `nilsystem:group=heisenberg3,tau=0.618;0.414;0.3`, and point parsing per system.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nilgroup::{GroupElement, MalcevCoord, NilGroupSpec};
use crate::nilmetric::QuotientPoint;
use crate::systems::{
    make_fullshift, make_furstenberg, make_nilsystem, make_rotation, make_skew_product, make_sturmian,
    parse_real, sturmian_code, FactorMap, FurstenbergRecipe, InverseLimit, Point, SymbolicWindow, SystemHandle,
    GOLDEN, SILVER,
};

#[derive(Clone, Debug)]
enum Chart {
    Torus(usize),
    Quotient(Arc<NilGroupSpec>),
    Sturmian { alpha: f64, half_len: usize },
    FullShift { k: u8, half_len: usize },
    Tower(InverseLimit),
}

/// A constructed system plus what is needed to read points for it.
#[derive(Clone, Debug)]
pub struct BuiltSystem {
    pub handle: SystemHandle,
    pub descriptor: String,
    chart: Chart,
}

struct Params<'a> {
    name: &'a str,
    map: BTreeMap<String, String>,
}

impl Params<'_> {
    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn real(&mut self, key: &str, default: f64) -> Result<f64> {
        self.take(key).map_or(Ok(default), |v| parse_real(&v))
    }

    fn int<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("{}: bad integer {key}={v}", self.name))),
        }
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().next() {
            None => Ok(()),
            Some(k) => Err(Error::Parse(format!("{}: unknown parameter '{k}'", self.name))),
        }
    }
}

fn reals(s: &str) -> Result<Vec<f64>> {
    s.split(';').filter(|t| !t.trim().is_empty()).map(parse_real).collect()
}

pub fn build_system(desc: &str) -> Result<BuiltSystem> {
    let (name, rest) = desc.trim().split_once(':').unwrap_or((desc.trim(), ""));
    let mut map = BTreeMap::new();
    for kv in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("{name}: expected key=value, got '{kv}'")))?;
        if map.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(Error::Parse(format!("{name}: duplicate parameter '{}'", k.trim())));
        }
    }
    let mut p = Params { name, map };
    let (handle, chart) = match name {
        "rotation" => {
            let alpha = p.take("alpha").map_or(Ok(vec![GOLDEN]), |s| reals(&s))?;
            if alpha.is_empty() {
                return Err(Error::Parse("rotation: empty alpha".into()));
            }
            let m = alpha.len();
            (make_rotation(alpha), Chart::Torus(m))
        }
        "skew" => (make_skew_product(p.real("alpha", GOLDEN)?), Chart::Torus(2)),
        "nilsystem" => {
            let group = Arc::new(NilGroupSpec::resolve(&p.take("group").unwrap_or_else(|| "heisenberg3".into()))?);
            let tau = match p.take("tau") {
                Some(s) => reals(&s)?,
                None if group.dimension == 3 => vec![GOLDEN, SILVER, 0.3],
                None => return Err(Error::Parse("nilsystem: tau is required for this group".into())),
            };
            let tau = GroupElement::from_slice(&group, &tau)?;
            (make_nilsystem(group.clone(), tau)?, Chart::Quotient(group))
        }
        "sturmian" => {
            let alpha = p.real("alpha", GOLDEN)?;
            let half_len = p.int("L", 32usize)?;
            (make_sturmian(alpha, half_len), Chart::Sturmian { alpha, half_len })
        }
        "fullshift" => {
            let k = p.int("k", 2u8)?;
            let half_len = p.int("L", 6usize)?;
            (make_fullshift(k, half_len)?, Chart::FullShift { k, half_len })
        }
        "furstenberg" => {
            let k = p.int("K", 30u32)?;
            let lambda = p.real("lambda", 1.0)?;
            let mut recipe = FurstenbergRecipe::default_recipe(k);
            if let Some(path) = p.take("coeffs") {
                recipe.terms = FurstenbergRecipe::load_terms(Path::new(&path))?;
            }
            recipe.alpha = p.real("alpha", recipe.alpha)?;
            (make_furstenberg(recipe, lambda)?, Chart::Torus(2))
        }
        "tower" => {
            let alpha = p.real("alpha", GOLDEN)?;
            let tower = InverseLimit::new(
                vec![make_rotation(vec![alpha]), make_skew_product(alpha)],
                vec![FactorMap::torus_projection(1)],
            )?;
            (SystemHandle::new(tower.clone()), Chart::Tower(tower))
        }
        other => return Err(Error::Parse(format!("unknown system '{other}'"))),
    };
    p.finish()?;
    Ok(BuiltSystem { handle, descriptor: desc.trim().to_string(), chart })
}

impl BuiltSystem {
    /// Coordinates `a;b;c`, a centered word of digits, `const:s`, or `z=0.3` for Sturmian codings.
    pub fn parse_point(&self, s: &str) -> Result<Point> {
        let s = s.trim();
        let coords = |m: usize| -> Result<Vec<f64>> {
            let v = reals(s)?;
            if v.len() != m {
                return Err(Error::Parse(format!("point '{s}' needs {m} coordinates")));
            }
            Ok(v)
        };
        match &self.chart {
            Chart::Torus(m) => Ok(Point::torus(&coords(*m)?)),
            Chart::Quotient(g) => {
                let t = MalcevCoord::new(coords(g.dimension)?)?;
                Ok(Point::Quotient(QuotientPoint::reduce(g, &t)))
            }
            Chart::Tower(t) => Ok(t.thread(Point::torus(&coords(2)?))),
            Chart::Sturmian { alpha, half_len } => match s.strip_prefix("z=") {
                Some(z) => Ok(Point::Symbolic(sturmian_code(*alpha, parse_real(z)?, *half_len))),
                None => self.word(s, 2, *half_len),
            },
            Chart::FullShift { k, half_len } => match s.strip_prefix("const:") {
                Some(c) => {
                    let c: u8 = c.parse().map_err(|_| Error::Parse(format!("bad symbol in '{s}'")))?;
                    Ok(Point::Symbolic(SymbolicWindow::constant(*k, c, *half_len)?))
                }
                None => self.word(s, *k, *half_len),
            },
        }
    }

    fn word(&self, s: &str, k: u8, half_len: usize) -> Result<Point> {
        let symbols: Vec<u8> = s
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(|| Error::Parse(format!("bad word '{s}'"))))
            .collect::<Result<_>>()?;
        if symbols.len() != 2 * half_len + 1 {
            return Err(Error::Parse(format!("word '{s}' must have length {}", 2 * half_len + 1)));
        }
        Ok(Point::Symbolic(SymbolicWindow::new(k, symbols)?))
    }

    /// `count` seeded sample points.
    pub fn samples(&self, seed: u64, stream: u64, count: usize) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        (0..count).map(|_| self.handle.sample(&mut rng)).collect()
    }
}
