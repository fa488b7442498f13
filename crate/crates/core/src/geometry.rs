//! Theoretical overlap of a node's radio disk with the hop-count rings.
//!
//! The sink sits at the origin and ring `n` is the annulus of radial
//! distances `[(n-1)R, nR)`. A node at offset `δ` inside ring `n` is placed
//! on the positive y-axis at distance `ρ = (n-1)R + δ`. Its radio disk of
//! radius `R` splits into three parts:
//!
//! * `A`: the part inside the inner boundary circle of radius `a = (n-1)R`,
//! * `C`: the part beyond the outer boundary circle of radius `b = nR`,
//! * `B = πR² - A - C`: the part inside the node's own ring.
//!
//! Both `A` and `C` are integrated in polar coordinates around the sink. A
//! ray at angle `θ` crosses the node's disk over `[r_in(θ), r_out(θ)]` with
//! `r_in/out = ρ sin θ ∓ sqrt(R² - ρ² cos² θ)`; clipping that chord to the
//! boundary circle gives a one-dimensional integrand in `θ`.
//!
//! For `A` the clipped chord is not always `[r_in, a]`: when the point where
//! a ray grazes the node's disk lies inside the inner circle (small offsets),
//! some rays cross the disk entirely inside it. Integrating `[r_in, a]` over
//! the window between the two boundary crossings alone, as
//! [`closed_form::area_inner_window`] does, misses those rays; the
//! quadrature integrates the clipped chord over the whole shadow of the disk.
//!
//! All computations run on the unit-range geometry (`R = 1`) and are scaled
//! by `R²` afterwards, so fractions depend on `(n, δ/R)` only.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::quadrature::{integrate, QuadOptions};

/// Relative quadrature tolerance, as a fraction of the disk area `πR²`.
pub const AREA_TOLERANCE: f64 = 1e-8;

/// Geometry of one hop-count ring: radio range and ring index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingModelParams {
    radio_range: f64,
    ring: u32,
}

impl RingModelParams {
    pub fn new(radio_range: f64, ring: u32) -> Result<Self> {
        if !(radio_range.is_finite() && radio_range > 0.0) {
            return Err(invalid(format!("radio range must be positive, got {radio_range}")));
        }
        if ring < 1 {
            return Err(invalid("ring index must be at least 1"));
        }
        Ok(Self { radio_range, ring })
    }

    pub fn radio_range(&self) -> f64 {
        self.radio_range
    }

    pub fn ring(&self) -> u32 {
        self.ring
    }

    pub fn disk_area(&self) -> f64 {
        PI * self.radio_range * self.radio_range
    }

    /// Distance from the sink of a node at `offset` in this ring.
    pub fn node_distance(&self, offset: f64) -> f64 {
        f64::from(self.ring - 1) * self.radio_range + offset
    }

    fn check_offset(&self, offset: f64) -> Result<()> {
        if offset.is_finite() && (0.0..self.radio_range).contains(&offset) {
            Ok(())
        } else {
            Err(invalid(format!(
                "offset {offset} outside [0, {})",
                self.radio_range
            )))
        }
    }

    /// Node distance and boundary radii in units of the radio range.
    fn unit_geometry(&self, offset: f64) -> UnitGeometry {
        let n = f64::from(self.ring);
        UnitGeometry {
            rho: (n - 1.0) + offset / self.radio_range,
            inner: n - 1.0,
            outer: n,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct UnitGeometry {
    rho: f64,
    inner: f64,
    outer: f64,
}

/// Fractions of the radio disk lying in rings `n-1`, `n` and `n+1`.
///
/// The same triple shape holds measured neighbor proportions, which live on
/// the same simplex plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AreaFractions {
    /// Share in ring `n-1` (area `A`).
    pub inner: f64,
    /// Share in the node's own ring (area `B`).
    pub same: f64,
    /// Share in ring `n+1` (area `C`).
    pub outer: f64,
}

impl AreaFractions {
    pub fn new(inner: f64, same: f64, outer: f64) -> Self {
        Self { inner, same, outer }
    }

    pub fn sum(&self) -> f64 {
        self.inner + self.same + self.outer
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.inner, self.same, self.outer]
    }

    /// Euclidean distance in fraction space.
    pub fn distance(&self, other: &AreaFractions) -> f64 {
        let di = self.inner - other.inner;
        let ds = self.same - other.same;
        let d_out = self.outer - other.outer;
        (di * di + ds * ds + d_out * d_out).sqrt()
    }

    /// Divides every component by the component sum.
    pub fn normalized(&self) -> Self {
        let s = self.sum();
        Self::new(self.inner / s, self.same / s, self.outer / s)
    }
}

/// Angle (measured from the x-axis) at which the node's circle crosses a
/// sink-centered circle of radius `boundary`, or `None` when the two
/// circles do not cross (tangency included).
fn crossing_angle(geom: &UnitGeometry, boundary: f64) -> Option<f64> {
    let rho = geom.rho;
    if rho == 0.0 || boundary == 0.0 {
        return None;
    }
    let y = (boundary * boundary + rho * rho - 1.0) / (2.0 * rho);
    let x2 = boundary * boundary - y * y;
    if x2.is_nan() || x2 <= 0.0 {
        return None;
    }
    Some(y.atan2(x2.sqrt()))
}

fn half_chord(rho: f64, theta: f64) -> f64 {
    let c = rho * theta.cos();
    (1.0 - c * c).max(0.0).sqrt()
}

fn quad_options() -> QuadOptions {
    QuadOptions {
        abs_tol: AREA_TOLERANCE * PI,
        max_segments: 4000,
    }
}

fn unit_inner_quadrature(geom: &UnitGeometry) -> Result<f64> {
    let Some(crossing) = crossing_angle(geom, geom.inner) else {
        return Ok(0.0);
    };
    let (rho, a) = (geom.rho, geom.inner);
    // Rays below the grazing angle miss the disk.
    let grazing = (1.0 / rho).min(1.0).acos();
    let clipped = |theta: f64| {
        let (s, h) = (rho * theta.sin(), half_chord(rho, theta));
        let near = (s - h).min(a);
        let far = (s + h).min(a);
        0.5 * (far * far - near * near)
    };
    let opts = QuadOptions {
        abs_tol: quad_options().abs_tol / 4.0,
        ..quad_options()
    };
    // The chord length has a square-root zero at the grazing angle;
    // θ = grazing + u² makes that piece smooth.
    let span = (crossing - grazing).max(0.0).sqrt();
    let shadow = integrate(
        |u: f64| clipped(grazing + u * u) * 2.0 * u,
        0.0,
        span,
        opts,
    )?;
    let window = integrate(clipped, crossing, 0.5 * PI, opts)?;
    // Symmetric about the y-axis.
    Ok(2.0 * (shadow.value + window.value))
}

fn unit_outer_quadrature(geom: &UnitGeometry) -> Result<f64> {
    let Some(theta1) = crossing_angle(geom, geom.outer) else {
        return Ok(0.0);
    };
    let (rho, b2) = (geom.rho, geom.outer * geom.outer);
    let integrand = |theta: f64| {
        let exit = rho * theta.sin() + half_chord(rho, theta);
        0.5 * (exit * exit - b2)
    };
    Ok(integrate(integrand, theta1, PI - theta1, quad_options())?.value)
}

/// Area of the radio disk inside the inner boundary circle of radius
/// `(n-1)R`. Ring-1 nodes have no inner region and get `0`.
pub fn area_inner(params: &RingModelParams, offset: f64) -> Result<f64> {
    params.check_offset(offset)?;
    if params.ring == 1 {
        return Ok(0.0);
    }
    let unit = unit_inner_quadrature(&params.unit_geometry(offset))?;
    Ok(unit * params.radio_range * params.radio_range)
}

/// Area of the radio disk beyond the outer boundary circle of radius `nR`.
pub fn area_outer(params: &RingModelParams, offset: f64) -> Result<f64> {
    params.check_offset(offset)?;
    let unit = unit_outer_quadrature(&params.unit_geometry(offset))?;
    Ok(unit * params.radio_range * params.radio_range)
}

pub fn area_fractions(params: &RingModelParams, offset: f64) -> Result<AreaFractions> {
    let disk = params.disk_area();
    let inner = area_inner(params, offset)? / disk;
    let outer = area_outer(params, offset)? / disk;
    let same = 1.0 - inner - outer;
    debug_assert!(same > -1e-9, "negative same-ring share {same}");
    Ok(AreaFractions {
        inner: inner.max(0.0),
        same: same.max(0.0),
        outer: outer.max(0.0),
    })
}

/// Closed-form evaluation of the angular integrals.
///
/// The crossing angles are written as `arctan(y / sqrt(a² - y²))` and
/// `arctan(-y / sqrt(a² - y²)) + π`, with `y` the ordinate of the crossing
/// points. The antiderivative of `ρ sin θ sqrt(R² - ρ² cos² θ)` contributes
/// the `-cos θ sqrt(..)` and `arctan` terms.
pub mod closed_form {
    use super::*;

    fn crossing_angles(rho: f64, boundary: f64) -> (f64, f64) {
        let y = (boundary * boundary - 1.0 + rho * rho) / (2.0 * rho);
        let root = (boundary * boundary - y * y).max(0.0).sqrt();
        ((y / root).atan(), (-y / root).atan() + PI)
    }

    // Antiderivative of ρ sin θ · sqrt(1 - ρ² cos² θ):
    // -ρ cos θ · q / 2 - arctan(ρ cos θ / q) / 2.
    fn chord_term(rho: f64, theta: f64) -> f64 {
        let c = rho * theta.cos();
        let q = (1.0 - c * c).max(0.0).sqrt();
        -0.5 * c * q - 0.5 * c.atan2(q)
    }

    fn inner_antiderivative(rho: f64, a: f64, theta: f64) -> f64 {
        0.5 * (a * a - 1.0) * theta
            + 0.5 * rho * rho * theta.sin() * theta.cos()
            + chord_term(rho, theta)
    }

    fn outer_antiderivative(rho: f64, b: f64, theta: f64) -> f64 {
        0.5 * (1.0 - b * b) * theta - 0.5 * rho * rho * theta.sin() * theta.cos()
            + chord_term(rho, theta)
    }

    fn unit_window(g: &UnitGeometry) -> f64 {
        let (t1, t2) = crossing_angles(g.rho, g.inner);
        inner_antiderivative(g.rho, g.inner, t2) - inner_antiderivative(g.rho, g.inner, t1)
    }

    /// `∫ (a² - r_in²)/2 dθ` between the two crossings of the node's circle
    /// with the inner boundary. This equals `A` only when the node's grazing
    /// points lie outside the inner disk, i.e. `ρ² ≥ R² + a²`; below that it
    /// omits the rays whose whole chord is inside the inner disk.
    pub fn area_inner_window(params: &RingModelParams, offset: f64) -> Result<f64> {
        params.check_offset(offset)?;
        let g = params.unit_geometry(offset);
        if params.ring == 1 || crossing_angle(&g, g.inner).is_none() {
            return Ok(0.0);
        }
        Ok(unit_window(&g) * params.radio_range * params.radio_range)
    }

    /// [`area_inner_window`] plus the full chords of the rays between each
    /// grazing angle and the nearest crossing whenever those chords lie
    /// inside the inner disk.
    pub fn area_inner(params: &RingModelParams, offset: f64) -> Result<f64> {
        params.check_offset(offset)?;
        let g = params.unit_geometry(offset);
        let Some(crossing) = crossing_angle(&g, g.inner).filter(|_| params.ring > 1) else {
            return Ok(0.0);
        };
        let mut unit = unit_window(&g);
        if g.rho * g.rho < 1.0 + g.inner * g.inner {
            let grazing = (1.0 / g.rho).min(1.0).acos();
            // Full chord area is ∫ 2ρ sin θ q dθ; two symmetric pieces.
            unit += 4.0 * (chord_term(g.rho, crossing) - chord_term(g.rho, grazing));
        }
        Ok(unit * params.radio_range * params.radio_range)
    }

    pub fn area_outer(params: &RingModelParams, offset: f64) -> Result<f64> {
        params.check_offset(offset)?;
        let g = params.unit_geometry(offset);
        if crossing_angle(&g, g.outer).is_none() {
            return Ok(0.0);
        }
        let (t1, t2) = crossing_angles(g.rho, g.outer);
        let unit = outer_antiderivative(g.rho, g.outer, t2) - outer_antiderivative(g.rho, g.outer, t1);
        Ok(unit * params.radio_range * params.radio_range)
    }
}

/// Quadrature and closed forms side by side for one `(n, offset)` point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossCheck {
    pub ring: u32,
    pub offset: f64,
    pub inner_quadrature: f64,
    /// Window-only integral, see [`closed_form::area_inner_window`].
    pub inner_window: f64,
    pub inner_closed_form: f64,
    pub outer_quadrature: f64,
    pub outer_closed_form: f64,
}

fn relative_gap(reference: f64, other: f64, floor: f64) -> f64 {
    (reference - other).abs() / reference.abs().max(floor)
}

impl CrossCheck {
    /// Largest gap between quadrature and the complete closed forms,
    /// relative to the quadrature value (floored at `floor`).
    pub fn closed_form_gap(&self, floor: f64) -> f64 {
        relative_gap(self.inner_quadrature, self.inner_closed_form, floor)
            .max(relative_gap(self.outer_quadrature, self.outer_closed_form, floor))
    }

    /// Gap between quadrature and the window-only inner integral.
    pub fn window_gap(&self, floor: f64) -> f64 {
        relative_gap(self.inner_quadrature, self.inner_window, floor)
    }
}

pub fn cross_check(params: &RingModelParams, offset: f64) -> Result<CrossCheck> {
    Ok(CrossCheck {
        ring: params.ring,
        offset,
        inner_quadrature: area_inner(params, offset)?,
        inner_window: closed_form::area_inner_window(params, offset)?,
        inner_closed_form: closed_form::area_inner(params, offset)?,
        outer_quadrature: area_outer(params, offset)?,
        outer_closed_form: closed_form::area_outer(params, offset)?,
    })
}
