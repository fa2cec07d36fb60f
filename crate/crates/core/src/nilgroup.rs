//! Arithmetic in Mal'cev coordinates of the second kind.
//!
//! A group element `g = exp(t_1 X_1) ... exp(t_m X_m)` is stored as the real
//! vector `t`. The group law is triangular:
//!
//! ```text
//! psi(xy)_1 = t_1 + u_1
//! psi(xy)_k = t_k + u_k + P_{k-1}(t_1..t_{k-1}, u_1..u_{k-1})
//! psi(x^-1)_k = -t_k + Q_{k-1}(t_1..t_{k-1})
//! ```
//!
//! The lattice `Gamma` is the set of elements with integer coordinates.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One term `coeff * t^t_exps * u^u_exps`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: f64,
    #[serde(default)]
    pub t_exps: Vec<u32>,
    #[serde(default)]
    pub u_exps: Vec<u32>,
}

impl Monomial {
    pub fn new(coeff: f64, t_exps: Vec<u32>, u_exps: Vec<u32>) -> Self {
        Monomial {
            coeff,
            t_exps,
            u_exps,
        }
    }

    fn eval(&self, t: &[f64], u: &[f64]) -> f64 {
        let mut v = self.coeff;
        for (x, &e) in t.iter().zip(&self.t_exps) {
            if e != 0 {
                v *= x.powi(e as i32);
            }
        }
        for (x, &e) in u.iter().zip(&self.u_exps) {
            if e != 0 {
                v *= x.powi(e as i32);
            }
        }
        v
    }
}

/// Sparse real polynomial.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial(pub Vec<Monomial>);

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial(Vec::new())
    }

    pub fn eval(&self, t: &[f64], u: &[f64]) -> f64 {
        self.0.iter().map(|m| m.eval(t, u)).sum()
    }

    fn max_t_len(&self) -> usize {
        self.0.iter().map(|m| m.t_exps.len()).max().unwrap_or(0)
    }

    fn max_u_len(&self) -> usize {
        self.0.iter().map(|m| m.u_exps.len()).max().unwrap_or(0)
    }
}

/// Coordinates `psi(g)` of a group element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MalcevCoord(Vec<f64>);

impl MalcevCoord {
    pub fn new(t: Vec<f64>) -> Result<Self> {
        if let Some(bad) = t.iter().find(|x| !x.is_finite()) {
            return Err(Error::Precondition(format!(
                "Mal'cev coordinate must be finite, got {bad}"
            )));
        }
        Ok(MalcevCoord(t))
    }

    pub fn zeros(m: usize) -> Self {
        MalcevCoord(vec![0.0; m])
    }

    pub(crate) fn from_vec_unchecked(t: Vec<f64>) -> Self {
        MalcevCoord(t)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|psi(g)| = ||psi(g)||_inf`.
    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl fmt::Display for MalcevCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// A nilpotent group law in Mal'cev coordinates together with its integer lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NilGroupSpec {
    pub dimension: usize,
    pub step: usize,
    pub mul_polys: Vec<Polynomial>,
    pub inv_polys: Vec<Polynomial>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

/// Outcome of the randomized axiom checks on a group law.
#[derive(Clone, Debug, Serialize)]
pub struct LawCheck {
    pub samples: usize,
    pub max_identity_err: f64,
    pub max_inverse_err: f64,
    pub max_assoc_err: f64,
    pub max_triangularity_err: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub const LAW_TOLERANCE: f64 = 1e-9;

impl NilGroupSpec {
    /// The 3-dimensional Heisenberg group: `psi` of the unipotent matrix
    /// `[[1,a,c],[0,1,b],[0,0,1]]` is `(a, b, c)`.
    pub fn heisenberg3() -> Self {
        NilGroupSpec {
            dimension: 3,
            step: 2,
            mul_polys: vec![
                Polynomial::zero(),
                Polynomial(vec![Monomial::new(1.0, vec![1, 0], vec![0, 1])]),
            ],
            inv_polys: vec![
                Polynomial::zero(),
                Polynomial(vec![Monomial::new(1.0, vec![1, 1], vec![])]),
            ],
            name: Some("heisenberg3".into()),
        }
    }

    /// `R^m` with the integer lattice, i.e. the torus `T^m`.
    pub fn abelian(m: usize) -> Self {
        let k = m.saturating_sub(1);
        NilGroupSpec {
            dimension: m,
            step: 1,
            mul_polys: vec![Polynomial::zero(); k],
            inv_polys: vec![Polynomial::zero(); k],
            name: Some(format!("abelian{m}")),
        }
    }

    /// Resolve a built-in name: `heisenberg3`, `abelian<m>` or `abelian3`.
    pub fn named(name: &str) -> Result<Self> {
        let n = name.trim();
        if n == "heisenberg3" || n == "heisenberg" {
            return Ok(Self::heisenberg3());
        }
        if let Some(rest) = n.strip_prefix("abelian") {
            let digits = rest.trim_start_matches('<').trim_end_matches('>');
            let m: usize = digits
                .parse()
                .map_err(|_| Error::Parse(format!("bad abelian dimension in {n:?}")))?;
            if m == 0 {
                return Err(Error::GroupLaw("dimension must be positive".into()));
            }
            return Ok(Self::abelian(m));
        }
        Err(Error::Parse(format!("unknown built-in group {n:?}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: NilGroupSpec =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut spec = Self::from_json(&text)?;
        if spec.name.is_none() {
            spec.name = Some(path.display().to_string());
        }
        Ok(spec)
    }

    /// Either a built-in name or a path to a JSON spec file.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        match Self::named(name_or_path) {
            Ok(g) => Ok(g),
            Err(_) if Path::new(name_or_path).exists() => Self::load(Path::new(name_or_path)),
            Err(e) => Err(e),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("group spec serializes")
    }

    pub fn label(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| format!("nilgroup(m={})", self.dimension))
    }

    /// Shape checks plus the load-time inverse check.
    pub fn validate(&self) -> Result<()> {
        let m = self.dimension;
        if m == 0 {
            return Err(Error::GroupLaw("dimension must be positive".into()));
        }
        if self.step == 0 {
            return Err(Error::GroupLaw("step must be positive".into()));
        }
        if self.mul_polys.len() != m - 1 || self.inv_polys.len() != m - 1 {
            return Err(Error::GroupLaw(format!(
                "expected {} multiplication and inversion polynomials, got {} and {}",
                m - 1,
                self.mul_polys.len(),
                self.inv_polys.len()
            )));
        }
        for (i, p) in self.mul_polys.iter().enumerate() {
            if p.max_t_len() > i + 1 || p.max_u_len() > i + 1 {
                return Err(Error::GroupLaw(format!(
                    "P_{} may only use the first {} coordinates of each factor",
                    i + 1,
                    i + 1
                )));
            }
            if p.0.iter().any(|mo| !mo.coeff.is_finite()) {
                return Err(Error::GroupLaw(format!("P_{} has a non-finite coefficient", i + 1)));
            }
        }
        for (i, q) in self.inv_polys.iter().enumerate() {
            if q.max_t_len() > i + 1 || q.max_u_len() > 0 {
                return Err(Error::GroupLaw(format!(
                    "Q_{} may only use the first {} coordinates of t",
                    i + 1,
                    i + 1
                )));
            }
            if q.0.iter().any(|mo| !mo.coeff.is_finite()) {
                return Err(Error::GroupLaw(format!("Q_{} has a non-finite coefficient", i + 1)));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x6d61_6c63);
        for _ in 0..64 {
            let t = random_coord(&mut rng, m, 2.0);
            let e = self.mul(&t, &self.inv(&t));
            let err = e.sup_norm();
            if err > LAW_TOLERANCE {
                return Err(Error::GroupLaw(format!(
                    "inversion polynomials do not invert: |t * inv(t)| = {err:e} at t = {t}"
                )));
            }
        }
        Ok(())
    }

    /// Randomized identity, inverse, associativity and triangularity checks.
    pub fn check_law(&self, samples: usize, seed: u64) -> LawCheck {
        let m = self.dimension;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let zero = MalcevCoord::zeros(m);
        let (mut id_err, mut inv_err, mut assoc_err, mut tri_err) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for _ in 0..samples {
            let a = random_coord(&mut rng, m, 2.0);
            let b = random_coord(&mut rng, m, 2.0);
            let c = random_coord(&mut rng, m, 2.0);
            id_err = id_err
                .max(diff(&self.mul(&a, &zero), &a))
                .max(diff(&self.mul(&zero, &a), &a));
            let ai = self.inv(&a);
            inv_err = inv_err
                .max(self.mul(&a, &ai).sup_norm())
                .max(self.mul(&ai, &a).sup_norm());
            let left = self.mul(&self.mul(&a, &b), &c);
            let right = self.mul(&a, &self.mul(&b, &c));
            assoc_err = assoc_err.max(diff(&left, &right));
            // perturb a single coordinate j and look for changes below j
            let j = rng.gen_range(0..m);
            let mut a2 = a.as_slice().to_vec();
            a2[j] += rng.gen_range(-1.0..1.0);
            let p1 = self.mul(&a, &b);
            let p2 = self.mul(&MalcevCoord(a2), &b);
            for k in 0..j {
                tri_err = tri_err.max((p1.0[k] - p2.0[k]).abs());
            }
        }
        let passed = id_err <= LAW_TOLERANCE
            && inv_err <= LAW_TOLERANCE
            && assoc_err <= LAW_TOLERANCE
            && tri_err == 0.0;
        LawCheck {
            samples,
            max_identity_err: id_err,
            max_inverse_err: inv_err,
            max_assoc_err: assoc_err,
            max_triangularity_err: tri_err,
            tolerance: LAW_TOLERANCE,
            passed,
        }
    }

    pub fn identity(&self) -> MalcevCoord {
        MalcevCoord::zeros(self.dimension)
    }

    fn check_dim(&self, a: &MalcevCoord) -> Result<()> {
        if a.len() != self.dimension {
            return Err(Error::Structure(format!(
                "coordinate of length {} in a group of dimension {}",
                a.len(),
                self.dimension
            )));
        }
        Ok(())
    }

    /// Product in coordinates; panics on a dimension mismatch.
    pub fn mul(&self, a: &MalcevCoord, b: &MalcevCoord) -> MalcevCoord {
        let mut out = vec![0.0; self.dimension];
        self.mul_prefix_into(&a.0, &b.0, self.dimension, &mut out);
        MalcevCoord(out)
    }

    pub fn try_mul(&self, a: &MalcevCoord, b: &MalcevCoord) -> Result<MalcevCoord> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        Ok(self.mul(a, b))
    }

    /// Writes the first `len` coordinates of `a * b` into `out`.
    pub(crate) fn mul_prefix_into(&self, a: &[f64], b: &[f64], len: usize, out: &mut [f64]) {
        assert!(a.len() == self.dimension && b.len() == self.dimension);
        for k in 0..len {
            let mut v = a[k] + b[k];
            if k > 0 {
                v += self.mul_polys[k - 1].eval(&a[..k], &b[..k]);
            }
            out[k] = v;
        }
    }

    pub fn inv(&self, a: &MalcevCoord) -> MalcevCoord {
        let mut out = vec![0.0; self.dimension];
        self.inv_prefix_into(&a.0, self.dimension, &mut out);
        MalcevCoord(out)
    }

    pub(crate) fn inv_prefix_into(&self, a: &[f64], len: usize, out: &mut [f64]) {
        for k in 0..len {
            let mut v = -a[k];
            if k > 0 {
                v += self.inv_polys[k - 1].eval(&a[..k], &[]);
            }
            out[k] = v;
        }
    }

    /// `g^n` by square-and-multiply; negative powers invert the positive one.
    pub fn pow(&self, g: &MalcevCoord, n: i64) -> MalcevCoord {
        let mut result = self.identity();
        let mut base = g.clone();
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        if n < 0 {
            self.inv(&result)
        } else {
            result
        }
    }

    /// `g = {g}[g]` with `psi({g})` in `[0,1)^m` and `[g]` in the lattice.
    ///
    /// Lattice generators are peeled off from the right in increasing
    /// coordinate order; right multiplication by `exp(n X_i)` leaves the
    /// coordinates below `i` untouched.
    pub fn factorize(&self, g: &MalcevCoord) -> (MalcevCoord, MalcevCoord) {
        let m = self.dimension;
        let mut h = g.0.clone();
        let mut ints = vec![0.0f64; m];
        let mut gen = vec![0.0; m];
        let mut tmp = vec![0.0; m];
        for i in 0..m {
            let mut n = h[i].floor();
            // guard against t - floor(t) rounding up to 1.0
            if h[i] - n >= 1.0 {
                n += 1.0;
            }
            if n != 0.0 {
                gen[i] = -n;
                self.mul_prefix_into(&h, &gen, m, &mut tmp);
                gen[i] = 0.0;
                std::mem::swap(&mut h, &mut tmp);
            }
            if h[i] < 0.0 || h[i] >= 1.0 {
                h[i] = crate::systems::wrap01(h[i]);
            }
            ints[i] = n;
        }
        // g = h * exp(n_m X_m) ... exp(n_1 X_1)
        let mut lattice = self.identity();
        for i in (0..m).rev() {
            if ints[i] != 0.0 {
                let mut e = vec![0.0; m];
                e[i] = ints[i];
                lattice = self.mul(&lattice, &MalcevCoord(e));
            }
        }
        let lattice = MalcevCoord(lattice.0.iter().map(|x| x.round()).collect());
        (MalcevCoord(h), lattice)
    }
}

fn diff(a: &MalcevCoord, b: &MalcevCoord) -> f64 {
    a.0.iter()
        .zip(&b.0)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

pub(crate) fn random_coord<R: Rng>(rng: &mut R, m: usize, scale: f64) -> MalcevCoord {
    MalcevCoord((0..m).map(|_| rng.gen_range(-scale..scale)).collect())
}

/// A group element bound to its group law.
#[derive(Clone, Debug)]
pub struct GroupElement {
    pub coord: MalcevCoord,
    pub group: Arc<NilGroupSpec>,
}

impl GroupElement {
    pub fn new(group: Arc<NilGroupSpec>, coord: MalcevCoord) -> Result<Self> {
        group.check_dim(&coord)?;
        Ok(GroupElement { coord, group })
    }

    pub fn from_slice(group: &Arc<NilGroupSpec>, t: &[f64]) -> Result<Self> {
        Self::new(group.clone(), MalcevCoord::new(t.to_vec())?)
    }

    pub fn identity(group: &Arc<NilGroupSpec>) -> Self {
        GroupElement {
            coord: group.identity(),
            group: group.clone(),
        }
    }

    fn same_group(&self, other: &GroupElement) -> Result<()> {
        if Arc::ptr_eq(&self.group, &other.group) || *self.group == *other.group {
            Ok(())
        } else {
            Err(Error::Structure("elements belong to different groups".into()))
        }
    }

    pub fn mul(&self, other: &GroupElement) -> Result<GroupElement> {
        self.same_group(other)?;
        Ok(GroupElement {
            coord: self.group.try_mul(&self.coord, &other.coord)?,
            group: self.group.clone(),
        })
    }

    pub fn inv(&self) -> GroupElement {
        GroupElement {
            coord: self.group.inv(&self.coord),
            group: self.group.clone(),
        }
    }

    pub fn pow(&self, n: i64) -> GroupElement {
        GroupElement {
            coord: self.group.pow(&self.coord, n),
            group: self.group.clone(),
        }
    }

    pub fn psi_norm(&self) -> f64 {
        self.coord.sup_norm()
    }

    /// Returns `({g}, [g])`.
    pub fn factorize(&self) -> (GroupElement, GroupElement) {
        let (frac, lat) = self.group.factorize(&self.coord);
        (
            GroupElement {
                coord: frac,
                group: self.group.clone(),
            },
            GroupElement {
                coord: lat,
                group: self.group.clone(),
            },
        )
    }

    pub fn psi(&self) -> &[f64] {
        self.coord.as_slice()
    }
}
