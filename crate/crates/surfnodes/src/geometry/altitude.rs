//! Altitude-grid ingestion: turns a latitude/longitude altitude raster into
//! a nodal spacing field over points on a sphere.
//!
//! File format (CSV):
//! ```text
//! nlat,nlon,lat0,lon0,dlat,dlon
//! <nlat>,<nlon>,<lat0>,<lon0>,<dlat>,<dlon>
//! a(0,0),a(0,1),...,a(0,nlon-1)
//! ...                                  # one grid row per line, nlat rows
//! ```
//! Angles are degrees; `lat0`/`lon0` locate the first sample, `dlat`/`dlon`
//! are the (positive) steps between samples. Altitude units are arbitrary —
//! only the affine map onto `[h_min, h_max]` matters.

use std::io::BufRead;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::surface::SpacingField;
use crate::real::{cast, Real};

/// A rectangular altitude raster on a latitude/longitude grid.
#[derive(Clone, Debug)]
pub struct AltitudeGrid {
    nlat: usize,
    nlon: usize,
    lat0: f64,
    lon0: f64,
    dlat: f64,
    dlon: f64,
    /// Row-major samples: `values[i * nlon + j]` is row i (latitude), col j.
    values: Vec<f64>,
}

impl AltitudeGrid {
    /// Builds a grid from explicit fields, validating shape.
    pub fn new(
        nlat: usize,
        nlon: usize,
        lat0: f64,
        lon0: f64,
        dlat: f64,
        dlon: f64,
        values: Vec<f64>,
    ) -> Result<Self> {
        if nlat == 0 || nlon == 0 {
            return Err(Error::InvalidAltitudeGrid("grid must be nonempty".into()));
        }
        if values.len() != nlat * nlon {
            return Err(Error::InvalidAltitudeGrid(format!(
                "expected {} values ({nlat}×{nlon}), got {}",
                nlat * nlon,
                values.len()
            )));
        }
        if !(dlat > 0.0) || !(dlon > 0.0) {
            return Err(Error::InvalidAltitudeGrid("dlat and dlon must be positive".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidAltitudeGrid("altitude values must be finite".into()));
        }
        Ok(AltitudeGrid { nlat, nlon, lat0, lon0, dlat, dlon, values })
    }

    /// Parses the CSV format documented at the module level.
    pub fn from_csv<Rd: BufRead>(reader: Rd) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidAltitudeGrid("empty file".into()))??;
        if header.trim() != "nlat,nlon,lat0,lon0,dlat,dlon" {
            return Err(Error::InvalidAltitudeGrid(format!(
                "bad header `{}` (expected `nlat,nlon,lat0,lon0,dlat,dlon`)",
                header.trim()
            )));
        }
        let meta = lines
            .next()
            .ok_or_else(|| Error::InvalidAltitudeGrid("missing metadata line".into()))??;
        let fields: Vec<&str> = meta.trim().split(',').collect();
        if fields.len() != 6 {
            return Err(Error::InvalidAltitudeGrid(format!(
                "metadata line needs 6 fields, got {}",
                fields.len()
            )));
        }
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidAltitudeGrid(format!("bad {what} `{s}`: {e}")))
        };
        let nlat = parse(fields[0], "nlat")? as usize;
        let nlon = parse(fields[1], "nlon")? as usize;
        let lat0 = parse(fields[2], "lat0")?;
        let lon0 = parse(fields[3], "lon0")?;
        let dlat = parse(fields[4], "dlat")?;
        let dlon = parse(fields[5], "dlon")?;
        let mut values = Vec::with_capacity(nlat.saturating_mul(nlon));
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            for s in line.trim().split(',') {
                values.push(parse(s, &format!("altitude (row {i})"))?);
            }
        }
        AltitudeGrid::new(nlat, nlon, lat0, lon0, dlat, dlon, values)
    }

    /// Loads a grid from a file path.
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv(std::io::BufReader::new(file))
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.nlon + j]
    }

    /// Bilinear interpolation at (lat, lon) in degrees, with indices clamped
    /// to the grid (no wrap-around: queries beyond the raster take the edge
    /// value). Longitudes are shifted by full turns into the raster's frame
    /// first, so grids spanning e.g. [0°, 360°) accept atan2-style (−180°,
    /// 180°] queries.
    pub fn sample(&self, lat: f64, lon: f64) -> f64 {
        let mut lon = lon;
        // Bring the query longitude into [lon0, lon0 + 360).
        while lon < self.lon0 {
            lon += 360.0;
        }
        while lon >= self.lon0 + 360.0 {
            lon -= 360.0;
        }
        let gi = (lat - self.lat0) / self.dlat;
        let gj = (lon - self.lon0) / self.dlon;
        let clamp = |g: f64, n: usize| -> (usize, usize, f64) {
            if n == 1 {
                return (0, 0, 0.0);
            }
            let max = (n - 1) as f64;
            let g = g.clamp(0.0, max);
            let i0 = g.floor().min(max - 1.0) as usize;
            (i0, i0 + 1, g - i0 as f64)
        };
        let (i0, i1, ti) = clamp(gi, self.nlat);
        let (j0, j1, tj) = clamp(gj, self.nlon);
        let a00 = self.at(i0, j0);
        let a01 = self.at(i0, j1);
        let a10 = self.at(i1, j0);
        let a11 = self.at(i1, j1);
        a00 * (1.0 - ti) * (1.0 - tj)
            + a01 * (1.0 - ti) * tj
            + a10 * ti * (1.0 - tj)
            + a11 * ti * tj
    }

    /// Minimum and maximum altitude in the raster.
    pub fn range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}

/// Spacing field backed by an altitude grid: bilinear altitude lookup at the
/// query point's spherical coordinates, then an affine map of the raster's
/// altitude range onto `[h_min, h_max]`, clamped.
#[derive(Debug)]
pub struct AltitudeSpacing<R> {
    grid: AltitudeGrid,
    h_min: R,
    h_max: R,
    alt_min: f64,
    alt_max: f64,
}

impl<R: Real> AltitudeSpacing<R> {
    /// Validates bounds and wraps the grid. A constant-altitude grid maps to
    /// the midpoint (h_min + h_max)/2.
    pub fn new(grid: AltitudeGrid, h_min: R, h_max: R) -> Result<Self> {
        if !(h_min > R::zero()) || !(h_max > R::zero()) {
            return Err(Error::InvalidSpacing("h_min and h_max must be positive".into()));
        }
        if !(h_min < h_max) {
            return Err(Error::InvalidSpacing("h_min must be less than h_max".into()));
        }
        let (alt_min, alt_max) = grid.range();
        Ok(AltitudeSpacing { grid, h_min, h_max, alt_min, alt_max })
    }

    pub fn h_min(&self) -> R {
        self.h_min
    }

    pub fn h_max(&self) -> R {
        self.h_max
    }

    /// Evaluates the spacing at an ambient point on (a scaling of) the
    /// sphere: latitude/longitude are recovered from the direction of `p`.
    pub fn eval(&self, p: &[R]) -> R {
        debug_assert_eq!(p.len(), 3, "altitude spacing expects 3-D ambient points");
        let x = p[0].to_f64().unwrap();
        let y = p[1].to_f64().unwrap();
        let z = p[2].to_f64().unwrap();
        let r = (x * x + y * y + z * z).sqrt();
        let (lat, lon) = if r > 0.0 {
            ((z / r).clamp(-1.0, 1.0).asin().to_degrees(), y.atan2(x).to_degrees())
        } else {
            (0.0, 0.0)
        };
        let alt = self.grid.sample(lat, lon);
        let hmin = self.h_min.to_f64().unwrap();
        let hmax = self.h_max.to_f64().unwrap();
        let span = self.alt_max - self.alt_min;
        let h = if span > 0.0 {
            hmin + (alt - self.alt_min) / span * (hmax - hmin)
        } else {
            0.5 * (hmin + hmax)
        };
        cast::<R>(h.clamp(hmin, hmax))
    }

    /// Wraps into a [`SpacingField`].
    pub fn into_field(self) -> SpacingField<R> {
        SpacingField::Altitude(Arc::new(self))
    }
}
