//! Dot layouts, logical-state charge configurations and charge-trap sampling.
//!
//! Positions are stored in meters. The JSON documents used by the command
//! line (`--geometry-file`, `--traps-file`) express positions in nanometers.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::rng::stream_rng;

pub const NM: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn from_nm([x, y, z]: [f64; 3]) -> Self {
        Vec3::new(x * NM, y * NM, z * NM)
    }

    pub fn to_nm(self) -> [f64; 3] {
        [self.x / NM, self.y / NM, self.z / NM]
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (self - other).norm()
    }

    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    fn lateral_distance(self, other: Vec3) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QubitKind {
    /// One excess electron on one of two dots.
    #[serde(rename = "dipole_2qd", alias = "2qd")]
    Dipole2QD,
    /// Two electrons on diagonally opposite corners of a square of four dots.
    #[serde(rename = "quadrupole_4qd", alias = "4qd")]
    Quadrupole4QD,
}

impl QubitKind {
    pub fn dot_count(self) -> usize {
        match self {
            QubitKind::Dipole2QD => 2,
            QubitKind::Quadrupole4QD => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            QubitKind::Dipole2QD => "2qd",
            QubitKind::Quadrupole4QD => "4qd",
        }
    }

    /// Basis states available to this encoding, in propagation order.
    pub fn basis(self) -> &'static [BasisState] {
        match self {
            QubitKind::Dipole2QD => &[BasisState::Zero, BasisState::One],
            QubitKind::Quadrupole4QD => &[
                BasisState::Zero,
                BasisState::One,
                BasisState::Eps0,
                BasisState::Eps1,
            ],
        }
    }
}

/// Charge configurations. `Eps0`/`Eps1` only exist for the 4-dot encoding
/// and are the same-edge configurations visited transiently during gates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BasisState {
    Zero,
    One,
    Eps0,
    Eps1,
}

// Dots are labelled A, B, C, D clockwise; indices follow that order.
const A: usize = 0;
const B: usize = 1;
const C: usize = 2;
const D: usize = 3;

/// Point-dot layout of a qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "GeometryDoc", try_from = "GeometryDoc")]
pub struct QubitGeometry {
    kind: QubitKind,
    dots: Vec<Vec3>,
    side_length: f64,
}

impl QubitGeometry {
    /// Build a geometry from explicit dot positions. `side_length` is the
    /// nominal array size used to scale placement errors.
    pub fn new(kind: QubitKind, dots: Vec<Vec3>, side_length: f64) -> Result<Self> {
        if dots.len() != kind.dot_count() {
            return Err(Error::InvalidGeometry(format!(
                "{:?} needs {} dots, got {}",
                kind,
                kind.dot_count(),
                dots.len()
            )));
        }
        if let Some(i) = dots.iter().position(|d| !d.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "dot {i} has a non-finite coordinate"
            )));
        }
        if !(side_length > 0.0 && side_length.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "side length must be positive, got {side_length}"
            )));
        }
        Ok(QubitGeometry {
            kind,
            dots,
            side_length,
        })
    }

    pub fn kind(&self) -> QubitKind {
        self.kind
    }

    pub fn dots(&self) -> &[Vec3] {
        &self.dots
    }

    pub fn side_length(&self) -> f64 {
        self.side_length
    }

    /// Indices of the dots occupied in `state`, or `None` if the encoding
    /// has no such state.
    pub fn occupancy(&self, state: BasisState) -> Option<&'static [usize]> {
        match (self.kind, state) {
            (QubitKind::Dipole2QD, BasisState::Zero) => Some(&[A]),
            (QubitKind::Dipole2QD, BasisState::One) => Some(&[B]),
            (QubitKind::Dipole2QD, _) => None,
            (QubitKind::Quadrupole4QD, BasisState::Zero) => Some(&[A, C]),
            (QubitKind::Quadrupole4QD, BasisState::One) => Some(&[B, D]),
            (QubitKind::Quadrupole4QD, BasisState::Eps0) => Some(&[A, B]),
            (QubitKind::Quadrupole4QD, BasisState::Eps1) => Some(&[C, D]),
        }
    }

    pub fn centroid(&self) -> Vec3 {
        centroid(self)
    }

    /// Mean position of the charges in `state`.
    pub fn charge_centroid(&self, state: BasisState) -> Option<Vec3> {
        let occ = self.occupancy(state)?;
        let sum = occ.iter().fold(Vec3::ZERO, |acc, &i| acc + self.dots[i]);
        Some(sum * (1.0 / occ.len() as f64))
    }
}

/// Ideal layout: the 2-dot qubit lies on the x axis, the 4-dot qubit is a
/// square; both sit in the `z = -depth` plane centred under the origin.
pub fn make_ideal_geometry(kind: QubitKind, side_length: f64, depth: f64) -> Result<QubitGeometry> {
    if !(side_length > 0.0 && side_length.is_finite()) {
        return Err(Error::InvalidGeometry(format!(
            "side length must be positive, got {side_length}"
        )));
    }
    if !(depth >= 0.0 && depth.is_finite()) {
        return Err(Error::InvalidGeometry(format!(
            "depth must be non-negative, got {depth}"
        )));
    }
    let h = side_length / 2.0;
    let z = -depth;
    let dots = match kind {
        QubitKind::Dipole2QD => vec![Vec3::new(-h, 0.0, z), Vec3::new(h, 0.0, z)],
        QubitKind::Quadrupole4QD => vec![
            Vec3::new(-h, h, z),
            Vec3::new(h, h, z),
            Vec3::new(h, -h, z),
            Vec3::new(-h, -h, z),
        ],
    };
    QubitGeometry::new(kind, dots, side_length)
}

/// Arithmetic mean of the dot positions.
pub fn centroid(geom: &QubitGeometry) -> Vec3 {
    let sum = geom.dots.iter().fold(Vec3::ZERO, |acc, &d| acc + d);
    sum * (1.0 / geom.dots.len() as f64)
}

/// Displace every dot by an isotropic Gaussian with per-axis standard
/// deviation `sigma * side_length`. The same seed always draws the same
/// unit displacements, so sweeping `sigma` with a fixed seed scales one
/// realisation.
pub fn perturb_geometry(geom: &QubitGeometry, sigma: f64, seed: u64) -> Result<QubitGeometry> {
    ensure(sigma >= 0.0 && sigma.is_finite(), || {
        format!("perturbation sigma must be non-negative, got {sigma}")
    })?;
    if sigma == 0.0 {
        return Ok(geom.clone());
    }
    let scale = sigma * geom.side_length;
    let mut rng = stream_rng(seed, &[0x9E0]);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let dots = geom
        .dots
        .iter()
        .map(|&d| d + Vec3::new(draw(), draw(), draw()) * scale)
        .collect();
    Ok(QubitGeometry {
        kind: geom.kind,
        dots,
        side_length: geom.side_length,
    })
}

/// A charge trap: a point charge that switches between two states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrapSite {
    pub position: Vec3,
    /// Switching rate of the Poisson process, Hz.
    pub rate: f64,
}

/// Rectangular sampling window in the trap plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapRegion {
    pub width: f64,
    pub height: f64,
    pub center_x: f64,
    pub center_y: f64,
    /// Height of the trap plane.
    pub z: f64,
}

impl TrapRegion {
    pub fn square(side: f64, center_x: f64, center_y: f64, z: f64) -> Self {
        TrapRegion {
            width: side,
            height: side,
            center_x,
            center_y,
            z,
        }
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn contains(&self, p: Vec3) -> bool {
        (p.x - self.center_x).abs() <= self.width / 2.0
            && (p.y - self.center_y).abs() <= self.height / 2.0
            && p.z == self.z
    }

    fn center(&self) -> Vec3 {
        Vec3::new(self.center_x, self.center_y, self.z)
    }
}

/// How many traps to place in a region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TrapCount {
    /// `round(density * area)`.
    Rounded,
    /// Poisson-distributed with mean `density * area`.
    Poisson,
    /// Exactly this many traps; the caller sizes the region as `n / density`.
    Fixed(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrapEnsemble {
    pub traps: Vec<TrapSite>,
    pub region: TrapRegion,
    /// Areal density, m⁻².
    pub density: f64,
    pub seed: u64,
}

impl TrapEnsemble {
    pub fn len(&self) -> usize {
        self.traps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traps.is_empty()
    }
}

/// Full trap-placement recipe.
#[derive(Clone, Debug, PartialEq)]
pub struct TrapSampler {
    pub region: TrapRegion,
    pub density: f64,
    pub count: TrapCount,
    pub rate: f64,
    /// Traps closer than this to any avoided point are redrawn.
    pub min_dot_distance: f64,
    /// Traps whose lateral distance from the region centre is below this are
    /// redrawn (an exclusion disc under the qubit).
    pub min_lateral_standoff: f64,
}

const MAX_REJECTIONS: usize = 10_000;

impl TrapSampler {
    pub fn new(region: TrapRegion, density: f64, rate: f64) -> Self {
        TrapSampler {
            region,
            density,
            count: TrapCount::Rounded,
            rate,
            min_dot_distance: 0.0,
            min_lateral_standoff: 0.0,
        }
    }

    /// `n` traps at areal `density`, in a square of area `n / density`
    /// centred laterally on `center` with the trap plane at height `z`.
    pub fn fixed_count(n: usize, density: f64, center: Vec3, z: f64, rate: f64) -> Result<Self> {
        ensure(density > 0.0 && density.is_finite(), || {
            format!("fixed-count sampling needs a positive density, got {density}")
        })?;
        let side = (n as f64 / density).sqrt();
        let mut sampler = Self::new(
            TrapRegion::square(side, center.x, center.y, z),
            density,
            rate,
        );
        sampler.count = TrapCount::Fixed(n);
        Ok(sampler)
    }

    pub fn with_min_dot_distance(mut self, d: f64) -> Self {
        self.min_dot_distance = d;
        self
    }

    pub fn with_lateral_standoff(mut self, r: f64) -> Self {
        self.min_lateral_standoff = r;
        self
    }

    /// Draw an ensemble; `avoid` lists dot positions subject to
    /// `min_dot_distance`.
    pub fn sample(&self, seed: u64, avoid: &[Vec3]) -> Result<TrapEnsemble> {
        ensure(self.density >= 0.0 && self.density.is_finite(), || {
            format!("trap density must be non-negative, got {}", self.density)
        })?;
        ensure(self.rate > 0.0 && self.rate.is_finite(), || {
            format!("trap switching rate must be positive, got {}", self.rate)
        })?;
        let area = self.region.area();
        if self.density > 0.0 && !(area > 0.0 && area.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "trap region has area {area} but the density is {}",
                self.density
            )));
        }
        let mean_count = self.density * area;
        let mut rng = stream_rng(seed, &[0x7A9]);
        let count = match self.count {
            TrapCount::Fixed(n) => n,
            _ if self.density == 0.0 => 0,
            TrapCount::Rounded => mean_count.round() as usize,
            TrapCount::Poisson => {
                let pois = Poisson::new(mean_count).map_err(|e| {
                    Error::InvalidParameter(format!("poisson mean {mean_count}: {e}"))
                })?;
                pois.sample(&mut rng) as usize
            }
        };
        if count > 0 && !(area > 0.0 && area.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "trap region has area {area} but {count} traps were requested"
            )));
        }
        let center = self.region.center();
        let mut traps = Vec::with_capacity(count);
        for _ in 0..count {
            let mut tries = 0;
            let position = loop {
                let p = Vec3::new(
                    self.region.center_x + (rng.random::<f64>() - 0.5) * self.region.width,
                    self.region.center_y + (rng.random::<f64>() - 0.5) * self.region.height,
                    self.region.z,
                );
                let clear_of_dots = avoid
                    .iter()
                    .all(|&d| p.distance(d) >= self.min_dot_distance);
                let clear_of_disc = p.lateral_distance(center) >= self.min_lateral_standoff;
                if clear_of_dots && clear_of_disc {
                    break p;
                }
                tries += 1;
                if tries >= MAX_REJECTIONS {
                    return Err(Error::InvalidParameter(
                        "trap exclusion zones leave no room in the sampling region".into(),
                    ));
                }
            };
            traps.push(TrapSite {
                position,
                rate: self.rate,
            });
        }
        Ok(TrapEnsemble {
            traps,
            region: self.region,
            density: self.density,
            seed,
        })
    }
}

/// Uniform i.i.d. trap positions over `region`, `round(density * area)`
/// of them, all switching at `rate`.
pub fn sample_traps(
    region: TrapRegion,
    density: f64,
    rate: f64,
    seed: u64,
) -> Result<TrapEnsemble> {
    TrapSampler::new(region, density, rate).sample(seed, &[])
}

// ---------------------------------------------------------------------------
// JSON documents

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeometryDoc {
    pub kind: QubitKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side_length_nm: Option<f64>,
    pub dots_nm: Vec<[f64; 3]>,
}

impl From<QubitGeometry> for GeometryDoc {
    fn from(g: QubitGeometry) -> Self {
        GeometryDoc {
            kind: g.kind,
            side_length_nm: Some(g.side_length / NM),
            dots_nm: g.dots.iter().map(|d| d.to_nm()).collect(),
        }
    }
}

impl TryFrom<GeometryDoc> for QubitGeometry {
    type Error = Error;

    fn try_from(doc: GeometryDoc) -> Result<Self> {
        let dots: Vec<Vec3> = doc.dots_nm.iter().copied().map(Vec3::from_nm).collect();
        let side = match doc.side_length_nm {
            Some(s) => s * NM,
            // Mean distance between cyclically adjacent dots.
            None if dots.len() >= 2 => {
                let n = if dots.len() == 2 { 1 } else { dots.len() };
                (0..n)
                    .map(|i| dots[i].distance(dots[(i + 1) % dots.len()]))
                    .sum::<f64>()
                    / n as f64
            }
            None => 0.0,
        };
        QubitGeometry::new(doc.kind, dots, side)
    }
}

/// A dipole/quadrupole pair evaluated against the same traps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometrySet {
    pub dipole: QubitGeometry,
    pub quadrupole: QubitGeometry,
}

impl GeometrySet {
    pub fn ideal(side_length: f64, depth: f64) -> Result<Self> {
        Ok(GeometrySet {
            dipole: make_ideal_geometry(QubitKind::Dipole2QD, side_length, depth)?,
            quadrupole: make_ideal_geometry(QubitKind::Quadrupole4QD, side_length, depth)?,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.dipole.kind != QubitKind::Dipole2QD
            || self.quadrupole.kind != QubitKind::Quadrupole4QD
        {
            return Err(Error::InvalidGeometry(
                "geometry set needs a dipole_2qd and a quadrupole_4qd entry".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrapDoc {
    pub x_nm: f64,
    pub y_nm: f64,
    pub z_nm: f64,
    pub rate_hz: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrapsDoc {
    pub traps: Vec<TrapDoc>,
    #[serde(default)]
    pub density_per_m2: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<TrapRegion>,
}

impl From<&TrapEnsemble> for TrapsDoc {
    fn from(e: &TrapEnsemble) -> Self {
        TrapsDoc {
            traps: e
                .traps
                .iter()
                .map(|t| {
                    let [x_nm, y_nm, z_nm] = t.position.to_nm();
                    TrapDoc {
                        x_nm,
                        y_nm,
                        z_nm,
                        rate_hz: t.rate,
                    }
                })
                .collect(),
            density_per_m2: e.density,
            seed: e.seed,
            region: Some(e.region),
        }
    }
}

impl TryFrom<TrapsDoc> for TrapEnsemble {
    type Error = Error;

    fn try_from(doc: TrapsDoc) -> Result<Self> {
        let mut traps = Vec::with_capacity(doc.traps.len());
        for (i, t) in doc.traps.iter().enumerate() {
            let position = Vec3::from_nm([t.x_nm, t.y_nm, t.z_nm]);
            if !position.is_finite() || !(t.rate_hz > 0.0 && t.rate_hz.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "trap {i} needs finite coordinates and a positive rate"
                )));
            }
            traps.push(TrapSite {
                position,
                rate: t.rate_hz,
            });
        }
        let region = doc.region.unwrap_or_else(|| bounding_region(&traps));
        Ok(TrapEnsemble {
            traps,
            region,
            density: doc.density_per_m2,
            seed: doc.seed,
        })
    }
}

fn bounding_region(traps: &[TrapSite]) -> TrapRegion {
    if traps.is_empty() {
        return TrapRegion::square(0.0, 0.0, 0.0, 0.0);
    }
    let (mut lo, mut hi) = (traps[0].position, traps[0].position);
    for t in traps {
        lo = Vec3::new(
            lo.x.min(t.position.x),
            lo.y.min(t.position.y),
            lo.z.min(t.position.z),
        );
        hi = Vec3::new(
            hi.x.max(t.position.x),
            hi.y.max(t.position.y),
            hi.z.max(t.position.z),
        );
    }
    TrapRegion {
        width: hi.x - lo.x,
        height: hi.y - lo.y,
        center_x: (lo.x + hi.x) / 2.0,
        center_y: (lo.y + hi.y) / 2.0,
        z: lo.z,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx_eq(a: Vec3, b: Vec3) -> bool {
        (a - b).norm() < 1e-20
    }

    #[test]
    fn ideal_quadrupole_layout() {
        let g = make_ideal_geometry(QubitKind::Quadrupole4QD, 20.0 * NM, 20.0 * NM).unwrap();
        let expect = [
            [-10.0, 10.0, -20.0],
            [10.0, 10.0, -20.0],
            [10.0, -10.0, -20.0],
            [-10.0, -10.0, -20.0],
        ];
        for (d, e) in g.dots().iter().zip(expect) {
            assert!(approx_eq(*d, Vec3::from_nm(e)));
        }
        assert!(approx_eq(g.centroid(), Vec3::from_nm([0.0, 0.0, -20.0])));
        // Both logical states share the array centroid exactly.
        let c0 = g.charge_centroid(BasisState::Zero).unwrap();
        let c1 = g.charge_centroid(BasisState::One).unwrap();
        assert_eq!(c0, c1);
        assert_eq!(c0, g.centroid());
        assert_eq!(g.dots()[0] + g.dots()[2], g.dots()[1] + g.dots()[3]);
    }

    #[test]
    fn ideal_dipole_layout() {
        let g = make_ideal_geometry(QubitKind::Dipole2QD, 20.0 * NM, 20.0 * NM).unwrap();
        assert!(approx_eq(g.dots()[0], Vec3::from_nm([-10.0, 0.0, -20.0])));
        assert!(approx_eq(g.dots()[1], Vec3::from_nm([10.0, 0.0, -20.0])));
        assert_eq!(g.occupancy(BasisState::Eps0), None);
        assert_eq!(g.occupancy(BasisState::One), Some(&[1usize][..]));
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(make_ideal_geometry(QubitKind::Dipole2QD, 0.0, 1.0).is_err());
        assert!(make_ideal_geometry(QubitKind::Dipole2QD, -1.0, 1.0).is_err());
        assert!(QubitGeometry::new(QubitKind::Quadrupole4QD, vec![Vec3::ZERO; 2], 1.0).is_err());
    }

    #[test]
    fn centroid_of_explicit_dots() {
        let g = QubitGeometry::new(
            QubitKind::Dipole2QD,
            vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0)],
            2.0,
        )
        .unwrap();
        assert_eq!(centroid(&g), Vec3::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn perturbation_identity_and_determinism() {
        let g = make_ideal_geometry(QubitKind::Quadrupole4QD, 20.0 * NM, 20.0 * NM).unwrap();
        assert_eq!(perturb_geometry(&g, 0.0, 5).unwrap(), g);
        let a = perturb_geometry(&g, 0.1, 5).unwrap();
        let b = perturb_geometry(&g, 0.1, 5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, g);
        assert_eq!(a.kind(), g.kind());
        assert!(perturb_geometry(&g, -0.1, 5).is_err());
        let p = perturb_geometry(&g, 0.1, 5).unwrap();
        let m = p.centroid();
        let expect = p.dots().iter().fold(Vec3::ZERO, |acc, &d| acc + d) * 0.25;
        assert!(approx_eq(m, expect));
    }

    #[test]
    fn perturbation_std_matches_sigma() {
        // 12 draws per call (4 dots x 3 axes), ~1e5 draws in total.
        let g = make_ideal_geometry(QubitKind::Quadrupole4QD, 20.0 * NM, 20.0 * NM).unwrap();
        let mut disp = Vec::new();
        for seed in 0..8334u64 {
            let p = perturb_geometry(&g, 0.1, seed).unwrap();
            for (a, b) in p.dots().iter().zip(g.dots()) {
                let d = *a - *b;
                disp.extend([d.x, d.y, d.z]);
            }
        }
        assert!(disp.len() >= 100_000);
        let n = disp.len() as f64;
        let mean = disp.iter().sum::<f64>() / n;
        let std = (disp.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!((std / (2.0 * NM) - 1.0).abs() < 0.02, "std = {std}");
    }

    #[test]
    fn sampling_counts_and_bounds() {
        let region = TrapRegion::square(100.0 * NM, 0.0, 0.0, 0.0);
        let empty = sample_traps(region, 0.0, 2e8, 1).unwrap();
        assert!(empty.is_empty());

        let ens = sample_traps(region, 1e15, 2e8, 1).unwrap();
        assert_eq!(ens.len(), 10);
        assert!(ens.traps.iter().all(|t| region.contains(t.position)));
        assert_eq!(ens, sample_traps(region, 1e15, 2e8, 1).unwrap());
        assert_ne!(ens, sample_traps(region, 1e15, 2e8, 2).unwrap());

        let zero_area = TrapRegion::square(0.0, 0.0, 0.0, 0.0);
        assert!(sample_traps(zero_area, 1e15, 2e8, 1).is_err());
        assert!(sample_traps(zero_area, 0.0, 2e8, 1).unwrap().is_empty());
    }

    #[test]
    fn fixed_count_region_matches_density() {
        let s = TrapSampler::fixed_count(100, 1e15, Vec3::ZERO, 0.0, 2e8).unwrap();
        assert!((s.region.area() - 100.0 / 1e15).abs() < 1e-24);
        let ens = s.sample(3, &[]).unwrap();
        assert_eq!(ens.len(), 100);
        assert!(ens
            .traps
            .iter()
            .all(|t| t.position.z == 0.0 && s.region.contains(t.position)));
    }

    #[test]
    fn poisson_count_mean_within_three_standard_errors() {
        let region = TrapRegion::square(200.0 * NM, 0.0, 0.0, 0.0);
        let density = 1e15; // mean 40 traps
        let mut sampler = TrapSampler::new(region, density, 1.0);
        sampler.count = TrapCount::Poisson;
        let counts: Vec<f64> = (0..2000)
            .map(|s| sampler.sample(s, &[]).unwrap().len() as f64)
            .collect();
        let mean = crate::stats::mean(&counts);
        let se = crate::stats::std_error(&counts);
        assert!(
            (mean - density * region.area()).abs() < 3.0 * se,
            "mean {mean} se {se}"
        );
    }

    #[test]
    fn exclusion_zones_are_respected() {
        let region = TrapRegion::square(100.0 * NM, 0.0, 0.0, 0.0);
        let dot = Vec3::from_nm([0.0, 0.0, 0.0]);
        let s = TrapSampler::new(region, 5e15, 1.0)
            .with_min_dot_distance(10.0 * NM)
            .with_lateral_standoff(20.0 * NM);
        let ens = s.sample(9, &[dot]).unwrap();
        assert_eq!(ens.len(), 50);
        for t in &ens.traps {
            assert!(t.position.distance(dot) >= 10.0 * NM);
            assert!(t.position.x.hypot(t.position.y) >= 20.0 * NM);
        }
        let impossible = TrapSampler::new(region, 1e15, 1.0).with_lateral_standoff(1.0);
        assert!(impossible.sample(1, &[]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = make_ideal_geometry(QubitKind::Quadrupole4QD, 20.0 * NM, 20.0 * NM).unwrap();
        let text = serde_json::to_string(&g).unwrap();
        assert!(text.contains("dots_nm"));
        let back: QubitGeometry = serde_json::from_str(&text).unwrap();
        for (a, b) in back.dots().iter().zip(g.dots()) {
            assert!((*a - *b).norm() < 1e-22);
        }

        let doc = r#"{"kind":"2qd","dots_nm":[[-5,0,-20],[5,0,-20]]}"#;
        let g2: QubitGeometry = serde_json::from_str(doc).unwrap();
        assert!((g2.side_length() - 10.0 * NM).abs() < 1e-20);
        let bad = r#"{"kind":"4qd","dots_nm":[[0,0,0]]}"#;
        assert!(serde_json::from_str::<QubitGeometry>(bad).is_err());

        let ens = sample_traps(TrapRegion::square(50.0 * NM, 0.0, 0.0, 0.0), 4e15, 2e8, 4).unwrap();
        let text = serde_json::to_string(&TrapsDoc::from(&ens)).unwrap();
        let back =
            TrapEnsemble::try_from(serde_json::from_str::<TrapsDoc>(&text).unwrap()).unwrap();
        assert_eq!(back.len(), ens.len());
        assert_eq!(back.region, ens.region);
    }
}
