//! Argument-principle root search over a rectangle.
//!
//! The winding number of `h_θ` around a contour counts enclosed zeros with
//! multiplicity. The search walks the region boundary tracking the continuous
//! argument of `h_θ`, subdivides cells that contain zeros until they are
//! small, polishes each candidate by (multiplicity-aware) Newton iteration,
//! and certifies multiplicities by the winding number of a small circle
//! around each polished root. The certified multiplicities must add up to the
//! region winding count, which is checked exactly.

use num_complex::Complex64;

use super::{CharacteristicModel, SpectralError};

/// Rectangle `{σ_min ≤ Re λ ≤ σ_max, |Im λ| ≤ φ_max}` scanned for roots.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_max: f64,
}

impl Region {
    pub fn new(re_min: f64, re_max: f64, im_max: f64) -> Self {
        Self { re_min, re_max, im_max }
    }

    /// Default search window for a model: `Re ∈ [-5/r, max(1, 2|θ|·|a|_TV)]`,
    /// `|Im| ≤ 8π/r`. Dominant roots of delay equations concentrate at low
    /// frequency; the winding count reported alongside the roots lets callers
    /// detect truncation and widen the window.
    pub fn default_for(model: &CharacteristicModel) -> Self {
        let r = model.measure.delay_r();
        let tv = model.measure.total_variation();
        Self {
            re_min: -5.0 / r,
            re_max: (2.0 * model.theta.abs() * tv).max(1.0),
            im_max: 8.0 * std::f64::consts::PI / r,
        }
    }

    fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    fn height(&self) -> f64 {
        2.0 * self.im_max
    }

    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.re_min - slack
            && z.re <= self.re_max + slack
            && z.im.abs() <= self.im_max + slack
    }
}

/// Tuning knobs for [`find_roots`](super::find_roots).
#[derive(Debug, Clone, Copy)]
pub struct RootSearchConfig {
    /// Accept a polished root when `|h(λ)| ≤ residual_tol · (1 + |λ|)`.
    pub residual_tol: f64,
    /// Newton limits closer than this are treated as one root.
    pub cluster_tol: f64,
    /// Cells are subdivided until their diagonal falls below this.
    pub cell_stop: f64,
    /// Roots with `|Im λ| ≤ real_axis_tol · (1 + |λ|)` snap to the real axis.
    pub real_axis_tol: f64,
    /// Budget for characteristic-function evaluations on contours.
    pub max_evals: usize,
    /// Budget for subdivision cells.
    pub max_cells: usize,
    /// Newton iteration cap per candidate.
    pub newton_max_iter: usize,
}

impl Default for RootSearchConfig {
    fn default() -> Self {
        Self {
            residual_tol: 1e-12,
            cluster_tol: 1e-7,
            cell_stop: 1e-3,
            real_axis_tol: 1e-9,
            max_evals: 8_000_000,
            max_cells: 200_000,
            newton_max_iter: 80,
        }
    }
}

/// A located root with its certified multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifiedRoot {
    pub lambda: Complex64,
    pub multiplicity: usize,
}

/// Result of a root search: roots sorted by `(Re, Im)` plus the boundary
/// winding count of the scanned region.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSearch {
    pub roots: Vec<CertifiedRoot>,
    pub winding_count: i64,
    pub region: Region,
}

struct Walker<'a> {
    model: &'a CharacteristicModel,
    evals: usize,
    max_evals: usize,
}

enum SegmentFailure {
    /// `h` is (numerically) zero on the contour; the contour must move.
    NearZero,
    /// Evaluation budget exhausted.
    Budget,
}

impl<'a> Walker<'a> {
    fn new(model: &'a CharacteristicModel, max_evals: usize) -> Self {
        Self { model, evals: 0, max_evals }
    }

    fn eval(&mut self, z: Complex64) -> Result<Complex64, SegmentFailure> {
        if self.evals >= self.max_evals {
            return Err(SegmentFailure::Budget);
        }
        self.evals += 1;
        let v = self.model.char_eval(z);
        if v.norm() <= 1e-13 * (1.0 + z.norm()) {
            return Err(SegmentFailure::NearZero);
        }
        Ok(v)
    }

    /// Continuous argument change along the straight segment `za → zb`,
    /// bisecting until each piece turns by less than π/2.
    fn arg_change(
        &mut self,
        za: Complex64,
        zb: Complex64,
        fa: Complex64,
        fb: Complex64,
        depth: usize,
    ) -> Result<f64, SegmentFailure> {
        let d = (fb / fa).arg();
        if d.abs() <= std::f64::consts::FRAC_PI_2 && depth > 0 {
            // One extra probe guards against a full turn hiding between the
            // endpoints.
            let zm = 0.5 * (za + zb);
            let fm = self.eval(zm)?;
            let d1 = (fm / fa).arg();
            let d2 = (fb / fm).arg();
            if d1.abs() <= std::f64::consts::FRAC_PI_2
                && d2.abs() <= std::f64::consts::FRAC_PI_2
            {
                return Ok(d1 + d2);
            }
            let left = self.arg_change(za, zm, fa, fm, depth - 1)?;
            let right = self.arg_change(zm, zb, fm, fb, depth - 1)?;
            return Ok(left + right);
        }
        if depth == 0 {
            // Cannot resolve the turn; treat like a singular contour so the
            // caller perturbs it.
            return Err(SegmentFailure::NearZero);
        }
        let zm = 0.5 * (za + zb);
        let fm = self.eval(zm)?;
        let left = self.arg_change(za, zm, fa, fm, depth - 1)?;
        let right = self.arg_change(zm, zb, fm, fb, depth - 1)?;
        Ok(left + right)
    }

    /// Winding number of `h` along the closed polyline through `points`.
    fn winding_polyline(&mut self, points: &[Complex64]) -> Result<i64, SegmentFailure> {
        let values: Vec<Complex64> = points
            .iter()
            .map(|&z| self.eval(z))
            .collect::<Result<_, _>>()?;
        let mut total = 0.0;
        for i in 0..points.len() {
            let j = (i + 1) % points.len();
            total += self.arg_change(points[i], points[j], values[i], values[j], 44)?;
        }
        let turns = total / (2.0 * std::f64::consts::PI);
        let rounded = turns.round();
        if (turns - rounded).abs() > 0.25 {
            return Err(SegmentFailure::NearZero);
        }
        Ok(rounded as i64)
    }

    fn winding_rect(&mut self, x0: f64, x1: f64, y0: f64, y1: f64) -> Result<i64, SegmentFailure> {
        // Pre-split long edges: the delay kernel makes arg(h) oscillate at a
        // rate of order r along the imaginary direction.
        let r = self.model.measure.delay_r();
        let rate = r.max(1.0);
        let mut points = Vec::new();
        let corners = [
            Complex64::new(x0, y0),
            Complex64::new(x1, y0),
            Complex64::new(x1, y1),
            Complex64::new(x0, y1),
        ];
        for i in 0..4 {
            let a = corners[i];
            let b = corners[(i + 1) % 4];
            let len = (b - a).norm();
            let n = ((len * rate / 0.4).ceil() as usize).clamp(1, 512);
            for k in 0..n {
                points.push(a + (b - a) * (k as f64 / n as f64));
            }
        }
        self.winding_polyline(&points)
    }

    fn winding_circle(&mut self, center: Complex64, radius: f64) -> Result<i64, SegmentFailure> {
        let n = 64usize;
        let points: Vec<Complex64> = (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                center + radius * Complex64::new(t.cos(), t.sin())
            })
            .collect();
        self.winding_polyline(&points)
    }
}

fn budget_err(walker: &Walker<'_>) -> SpectralError {
    SpectralError::RegionTooLarge(walker.evals)
}

/// Locates every zero of `h_θ` inside `region`, with multiplicities.
///
/// The returned list is closed under conjugation (the region is symmetric
/// about the real axis by construction) and the sum of multiplicities equals
/// the boundary winding count exactly.
pub fn find_roots(
    model: &CharacteristicModel,
    region: Region,
    config: &RootSearchConfig,
) -> Result<RootSearch, SpectralError> {
    let mut cfg = *config;
    let mut last = None;
    for _ in 0..2 {
        match find_roots_once(model, region, &cfg) {
            Ok(found) => return Ok(found),
            Err(e @ SpectralError::RegionTooLarge(_)) => return Err(e),
            Err(e) => {
                last = Some(e);
                cfg.cell_stop /= 10.0;
            }
        }
    }
    Err(last.expect("at least one attempt"))
}

fn find_roots_once(
    model: &CharacteristicModel,
    region: Region,
    cfg: &RootSearchConfig,
) -> Result<RootSearch, SpectralError> {
    let mut walker = Walker::new(model, cfg.max_evals);

    // Outer boundary, perturbed outward if it grazes a root.
    let pad = 1e-6 * (1.0 + region.width().max(region.height()));
    let mut grown = region;
    let mut winding = None;
    for attempt in 0..6 {
        match walker.winding_rect(grown.re_min, grown.re_max, -grown.im_max, grown.im_max) {
            Ok(w) => {
                winding = Some(w);
                break;
            }
            Err(SegmentFailure::Budget) => return Err(budget_err(&walker)),
            Err(SegmentFailure::NearZero) => {
                let d = pad * (attempt + 1) as f64;
                grown = Region::new(grown.re_min - d, grown.re_max + d, grown.im_max + d);
            }
        }
    }
    let winding = winding.ok_or_else(|| {
        SpectralError::NonConvergence("boundary winding failed after perturbation".into())
    })?;
    if winding == 0 {
        return Ok(RootSearch { roots: Vec::new(), winding_count: 0, region: grown });
    }

    // Subdivide cells that wind until they are small.
    let mut stack = vec![(grown.re_min, grown.re_max, -grown.im_max, grown.im_max, winding)];
    let mut candidates: Vec<(Complex64, i64)> = Vec::new();
    let mut cells = 0usize;
    while let Some((x0, x1, y0, y1, w)) = stack.pop() {
        cells += 1;
        if cells > cfg.max_cells {
            return Err(SpectralError::RegionTooLarge(walker.evals));
        }
        let diag = ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();
        if diag <= cfg.cell_stop {
            candidates.push((Complex64::new(0.5 * (x0 + x1), 0.5 * (y0 + y1)), w));
            continue;
        }
        // Split in four; nudge the split point if it lands on a root.
        let mut split = None;
        for &(fx, fy) in
            &[(0.5, 0.5), (0.5137, 0.4863), (0.4711, 0.5289), (0.5391, 0.5277)]
        {
            let xm = x0 + fx * (x1 - x0);
            let ym = y0 + fy * (y1 - y0);
            let quads = [
                (x0, xm, y0, ym),
                (xm, x1, y0, ym),
                (x0, xm, ym, y1),
                (xm, x1, ym, y1),
            ];
            let mut ws = Vec::with_capacity(4);
            let mut ok = true;
            for &(a, b, c, d) in &quads {
                match walker.winding_rect(a, b, c, d) {
                    Ok(wq) => ws.push(wq),
                    Err(SegmentFailure::Budget) => return Err(budget_err(&walker)),
                    Err(SegmentFailure::NearZero) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && ws.iter().sum::<i64>() == w {
                split = Some((quads, ws));
                break;
            }
        }
        let (quads, ws) = split.ok_or_else(|| {
            SpectralError::NonConvergence(format!(
                "could not split cell [{x0}, {x1}] x [{y0}, {y1}] consistently"
            ))
        })?;
        for (&(a, b, c, d), &wq) in quads.iter().zip(&ws) {
            if wq != 0 {
                stack.push((a, b, c, d, wq));
            }
        }
    }

    // Newton polish each candidate, then cluster coincident limits.
    let mut polished: Vec<(Complex64, i64)> = Vec::new();
    for &(z0, w) in &candidates {
        let z = newton_polish(model, z0, w.max(1) as usize, cfg)?;
        polished.push((z, w));
    }
    let clusters = cluster(&polished, cfg.cluster_tol);

    // Certify multiplicities by a small circle around each cluster.
    let mut roots: Vec<CertifiedRoot> = Vec::new();
    for c in &clusters {
        let center = c.center;
        let mut radius = (1e-5 * (1.0 + center.norm())).max(4.0 * c.spread);
        for other in &clusters {
            if (other.center - center).norm() > 0.0 {
                let d = (other.center - center).norm();
                if d > 0.0 {
                    radius = radius.min(0.4 * d);
                }
            }
        }
        if radius <= c.spread {
            return Err(SpectralError::NonConvergence(format!(
                "cannot isolate root cluster near {center}"
            )));
        }
        let mult = match walker.winding_circle(center, radius) {
            Ok(m) => m,
            Err(SegmentFailure::Budget) => return Err(budget_err(&walker)),
            Err(SegmentFailure::NearZero) => {
                return Err(SpectralError::NonConvergence(format!(
                    "certification circle near {center} grazes a root"
                )))
            }
        };
        if mult <= 0 {
            // A spurious Newton limit (e.g. polish drifted outside the cell);
            // the winding consistency check below reports the deficit.
            continue;
        }
        let lambda = newton_polish(model, center, mult as usize, cfg)?;
        let residual = model.char_eval(lambda).norm();
        if residual > cfg.residual_tol * (1.0 + lambda.norm()) {
            return Err(SpectralError::NonConvergence(format!(
                "residual {residual:.3e} too large at {lambda}"
            )));
        }
        roots.push(CertifiedRoot { lambda, multiplicity: mult as usize });
    }

    // Snap near-real roots onto the axis and enforce exact conjugate closure.
    for root in roots.iter_mut() {
        if root.lambda.im.abs() <= cfg.real_axis_tol * (1.0 + root.lambda.norm()) {
            root.lambda.im = 0.0;
        }
    }
    let mut upper: Vec<CertifiedRoot> = Vec::new();
    let mut lower: Vec<CertifiedRoot> = Vec::new();
    let mut reals: Vec<CertifiedRoot> = Vec::new();
    for r in roots {
        if r.lambda.im > 0.0 {
            upper.push(r);
        } else if r.lambda.im < 0.0 {
            lower.push(r);
        } else {
            reals.push(r);
        }
    }
    let mut paired: Vec<CertifiedRoot> = reals;
    for u in &upper {
        let mate = lower
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                let da = (a.lambda - u.lambda.conj()).norm();
                let db = (b.lambda - u.lambda.conj()).norm();
                da.partial_cmp(&db).expect("finite")
            })
            .map(|(i, r)| (i, *r));
        match mate {
            Some((i, r))
                if (r.lambda - u.lambda.conj()).norm() <= 1e-6 * (1.0 + u.lambda.norm())
                    && r.multiplicity == u.multiplicity =>
            {
                lower.swap_remove(i);
                paired.push(*u);
                paired.push(CertifiedRoot {
                    lambda: u.lambda.conj(),
                    multiplicity: u.multiplicity,
                });
            }
            _ => {
                return Err(SpectralError::NonConvergence(format!(
                    "no conjugate mate found for root {}",
                    u.lambda
                )))
            }
        }
    }
    if !lower.is_empty() {
        return Err(SpectralError::NonConvergence(
            "unpaired roots below the real axis".into(),
        ));
    }

    let found: i64 = paired.iter().map(|r| r.multiplicity as i64).sum();
    if found != winding {
        return Err(SpectralError::WindingMismatch { expected: winding, found });
    }
    paired.sort_by(|a, b| {
        (a.lambda.re, a.lambda.im)
            .partial_cmp(&(b.lambda.re, b.lambda.im))
            .expect("finite roots")
    });
    Ok(RootSearch { roots: paired, winding_count: winding, region: grown })
}

/// Multiplicity-aware Newton iteration `z ← z − m·h/h'`; quadratically
/// convergent at a root of multiplicity `m`.
fn newton_polish(
    model: &CharacteristicModel,
    start: Complex64,
    multiplicity: usize,
    cfg: &RootSearchConfig,
) -> Result<Complex64, SpectralError> {
    let m = multiplicity.max(1) as f64;
    let mut z = start;
    for _ in 0..cfg.newton_max_iter {
        let h = model.char_eval(z);
        let hp = model.char_derivative(z, 1)?;
        if hp.norm() < 1e-280 {
            z += Complex64::new(1e-9, 1e-9) * (1.0 + z.norm());
            continue;
        }
        let step = m * h / hp;
        z -= step;
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            return Ok(z);
        }
    }
    Err(SpectralError::NonConvergence(format!(
        "Newton did not converge from {start} (multiplicity hint {multiplicity})"
    )))
}

struct Cluster {
    center: Complex64,
    spread: f64,
}

fn cluster(points: &[(Complex64, i64)], tol: f64) -> Vec<Cluster> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (points[i].0 - points[j].0).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    groups
        .values()
        .map(|members| {
            let center = points[members[0]].0;
            let spread = members
                .iter()
                .map(|&i| (points[i].0 - center).norm())
                .fold(0.0, f64::max);
            Cluster { center, spread }
        })
        .collect()
}
