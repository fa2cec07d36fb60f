use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{circle_dist, unit_grid, DynamicalSystem, Point, PointKind, SystemHandle};
use crate::error::{Error, Result};
use crate::nilgroup::{GroupElement, MalcevCoord, NilGroupSpec};
use crate::nilmetric::{dist_quotient, MetricParams, QuotientPoint};

/// Left translation `x Gamma -> tau x Gamma` on `G / Gamma`.
#[derive(Clone, Debug)]
pub struct NilSystem {
    pub group: Arc<NilGroupSpec>,
    pub tau: MalcevCoord,
    tau_inv: MalcevCoord,
    pub params: MetricParams,
    /// Coordinates with no correction term in `mul` or `inv`; lattice hops move them by integers.
    additive: Vec<usize>,
}

pub fn make_nilsystem(group: Arc<NilGroupSpec>, tau: GroupElement) -> Result<SystemHandle> {
    Ok(SystemHandle::new(NilSystem::new(group, tau)?))
}

impl NilSystem {
    pub fn new(group: Arc<NilGroupSpec>, tau: GroupElement) -> Result<Self> {
        Self::with_params(group, tau, MetricParams::default())
    }

    pub fn with_params(
        group: Arc<NilGroupSpec>,
        tau: GroupElement,
        params: MetricParams,
    ) -> Result<Self> {
        if *tau.group != *group {
            return Err(Error::Structure("tau does not belong to the group".into()));
        }
        params.validate()?;
        // reps have norm < 1, so the default radius is at most 4
        let radius = params.gamma_bound.unwrap_or(4.0).ceil();
        let cells = (2.0 * radius + 1.0).powi(group.dimension as i32);
        if cells > params.cell_budget as f64 {
            return Err(Error::Budget(format!(
                "quotient metric needs {cells} lattice cells, budget is {}",
                params.cell_budget
            )));
        }
        let tau_inv = group.inv(&tau.coord);
        let additive = (0..group.dimension)
            .filter(|&i| i == 0 || (group.mul_polys[i - 1].0.is_empty() && group.inv_polys[i - 1].0.is_empty()))
            .collect();
        Ok(NilSystem {
            tau: tau.coord,
            tau_inv,
            additive,
            group,
            params,
        })
    }

    pub fn point(&self, t: &[f64]) -> Result<QuotientPoint> {
        if t.len() != self.group.dimension {
            return Err(Error::Structure(format!(
                "point of dimension {} in a group of dimension {}",
                t.len(),
                self.group.dimension
            )));
        }
        Ok(QuotientPoint::reduce(&self.group, &MalcevCoord::new(t.to_vec())?))
    }

    pub fn translate(&self, p: &QuotientPoint) -> QuotientPoint {
        QuotientPoint::reduce(&self.group, &self.group.mul(&self.tau, p.rep()))
    }

    pub fn translate_back(&self, p: &QuotientPoint) -> QuotientPoint {
        QuotientPoint::reduce(&self.group, &self.group.mul(&self.tau_inv, p.rep()))
    }

    pub fn quotient_distance(&self, p: &QuotientPoint, q: &QuotientPoint) -> Result<f64> {
        dist_quotient(&self.group, p, q, &self.params)
    }

    fn unwrap<'a>(&self, p: &'a Point) -> &'a QuotientPoint {
        match p {
            Point::Quotient(q) => q,
            other => panic!("nilsystem expects quotient points, got {other:?}"),
        }
    }
}

impl DynamicalSystem for NilSystem {
    fn name(&self) -> String {
        format!("nilsystem({}, tau={})", self.group.label(), self.tau)
    }

    fn point_kind(&self) -> PointKind {
        PointKind::QuotientPoint
    }

    fn step(&self, p: &Point) -> Point {
        Point::Quotient(self.translate(self.unwrap(p)))
    }

    fn inverse_step(&self, p: &Point) -> Point {
        Point::Quotient(self.translate_back(self.unwrap(p)))
    }

    fn step_n(&self, p: &Point, n: i64) -> Point {
        let g = self.group.pow(&self.tau, n);
        Point::Quotient(QuotientPoint::reduce(
            &self.group,
            &self.group.mul(&g, self.unwrap(p).rep()),
        ))
    }

    fn metric(&self, p: &Point, q: &Point) -> f64 {
        self.quotient_distance(self.unwrap(p), self.unwrap(q))
            .expect("lattice budget was checked at construction")
    }

    fn metric_exceeds(&self, p: &Point, q: &Point, r: f64) -> bool {
        let (a, b) = (self.unwrap(p).coords(), self.unwrap(q).coords());
        // sup-norm of any hop dominates the circle distance of each additive coordinate
        self.additive.iter().any(|&i| circle_dist(a[i], b[i]) > r) || self.metric(p, q) > r
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Point {
        let t: Vec<f64> = (0..self.group.dimension).map(|_| rng.gen::<f64>()).collect();
        Point::Quotient(QuotientPoint::from_reduced(MalcevCoord::from_vec_unchecked(t)))
    }

    fn diameter(&self) -> f64 {
        1.0
    }

    fn grid_dims(&self) -> usize {
        self.group.dimension
    }

    fn grid(&self, res: &[usize]) -> Option<Vec<Point>> {
        Some(
            unit_grid(res)
                .into_iter()
                .map(|t| Point::Quotient(QuotientPoint::from_reduced(MalcevCoord::from_vec_unchecked(t))))
                .collect(),
        )
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "name": "nilsystem",
            "group": self.group.label(),
            "tau": self.tau.as_slice(),
            "gamma_bound": self.params.gamma_bound,
        })
    }
}
