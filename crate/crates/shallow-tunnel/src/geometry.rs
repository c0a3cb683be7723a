//! Bilinear mapping between the half-plane with a circular opening and the
//! annulus `r <= |zeta| <= 1`.
//!
//! The ground surface maps onto the unit circle, the tunnel periphery onto
//! `|zeta| = r`, and the point at infinity onto `zeta = 1`.

use crate::error::{Result, TunnelError};
use num_complex::Complex64;

/// Tolerance on `|zeta|` when deciding whether a point lies on a circle.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Points closer than this to `zeta = 1` are rejected by the mapping.
pub const POLE_RADIUS: f64 = 1e-6;

/// Physical description of the opening.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunnelGeometry {
    /// Tunnel radius `R` in metres.
    pub radius: f64,
    /// Depth `h` of the tunnel centre below the surface in metres.
    pub depth: f64,
    /// Half-width `x0` of the free part of the ground surface in metres.
    pub x0: f64,
}

impl TunnelGeometry {
    pub fn new(radius: f64, depth: f64, x0: f64) -> Result<Self> {
        let g = Self { radius, depth, x0 };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(TunnelError::InvalidConfig(format!(
                "radius must be positive, got {}",
                self.radius
            )));
        }
        if !(self.depth > self.radius) || !self.depth.is_finite() {
            return Err(TunnelError::DegenerateGeometry(format!(
                "depth {} must exceed radius {}",
                self.depth, self.radius
            )));
        }
        if !(self.x0 > 0.0) || !self.x0.is_finite() {
            return Err(TunnelError::InvalidConfig(format!(
                "free surface half-width must be positive, got {}",
                self.x0
            )));
        }
        Ok(())
    }

    /// Tunnel centre `-ih` in the physical plane.
    pub fn centre(&self) -> Complex64 {
        Complex64::new(0.0, -self.depth)
    }
}

/// Constants of the mapping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedGeometry {
    /// Mapping constant `a` in metres, `a^2 = h^2 - R^2`.
    pub a: f64,
    /// Inner radius of the annulus.
    pub r: f64,
    /// Polar angle of the images of the points `x = +-x0` on the unit circle.
    pub theta0: f64,
}

pub fn derive_geometry(geom: &TunnelGeometry) -> Result<DerivedGeometry> {
    geom.validate()?;
    let (rr, h) = (geom.radius, geom.depth);
    let root = ((h - rr) * (h + rr)).sqrt();
    let r = rr / (h + root);
    let a = h * (1.0 - r * r) / (1.0 + r * r);
    let theta0 = 2.0 * (a / geom.x0).atan();
    Ok(DerivedGeometry { a, r, theta0 })
}

/// `zeta = (z + ia) / (z - ia)`.
pub fn map_forward(z: Complex64, g: &DerivedGeometry) -> Result<Complex64> {
    let ia = Complex64::new(0.0, g.a);
    let den = z - ia;
    if den.norm() <= POLE_RADIUS * g.a {
        return Err(TunnelError::Singularity(format!(
            "z = {z} is the pole ia of the forward map"
        )));
    }
    Ok((z + ia) / den)
}

/// `z = -ia (1 + zeta) / (1 - zeta)`.
pub fn map_backward(zeta: Complex64, g: &DerivedGeometry) -> Result<Complex64> {
    let den = check_pole(zeta)?;
    Ok(Complex64::new(0.0, -g.a) * (1.0 + zeta) / den)
}

/// `z'(zeta) = -2ia / (1 - zeta)^2`.
pub fn map_derivative(zeta: Complex64, g: &DerivedGeometry) -> Result<Complex64> {
    let den = check_pole(zeta)?;
    Ok(Complex64::new(0.0, -2.0 * g.a) / (den * den))
}

fn check_pole(zeta: Complex64) -> Result<Complex64> {
    let den = 1.0 - zeta;
    if den.norm() <= POLE_RADIUS {
        return Err(TunnelError::Singularity(format!(
            "zeta = {zeta} is the image of infinity"
        )));
    }
    Ok(den)
}

/// Where an annulus point sits relative to the two boundary circles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnnulusRegion {
    GroundSurface,
    TunnelPeriphery,
    Interior,
    Outside,
}

pub fn classify(zeta: Complex64, g: &DerivedGeometry) -> AnnulusRegion {
    let rho = zeta.norm();
    if (rho - 1.0).abs() <= BOUNDARY_TOL {
        AnnulusRegion::GroundSurface
    } else if (rho - g.r).abs() <= BOUNDARY_TOL {
        AnnulusRegion::TunnelPeriphery
    } else if rho > g.r && rho < 1.0 {
        AnnulusRegion::Interior
    } else {
        AnnulusRegion::Outside
    }
}
