//! Point cloud containers shared by the scanner, the ground filter and registration.

use nalgebra::Vector3;

use crate::error::CloudError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Laser,
    Robot,
    World,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Terrain,
    NonTerrain,
}

impl Label {
    /// Numeric code used by the PLY and CSV formats.
    pub fn code(self) -> u8 {
        match self {
            Label::Terrain => 0,
            Label::NonTerrain => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Label> {
        match code {
            0 => Some(Label::Terrain),
            1 => Some(Label::NonTerrain),
            _ => None,
        }
    }
}

/// Ordered scan points with a frame tag.
///
/// `scanline_breaks` holds the index of the first point of every scan line
/// except the first one (which always starts at 0).
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Vector3<f64>>,
    pub frame: Frame,
    pub scanline_breaks: Vec<usize>,
}

impl PointCloud {
    pub fn new(points: Vec<Vector3<f64>>, frame: Frame) -> Self {
        Self {
            points,
            frame,
            scanline_breaks: Vec::new(),
        }
    }

    pub fn empty(frame: Frame) -> Self {
        Self::new(Vec::new(), frame)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Checks that breaks are strictly increasing and inside `1..len`.
    pub fn validate(&self) -> Result<(), CloudError> {
        let len = self.points.len();
        let mut prev = 0usize;
        for &b in &self.scanline_breaks {
            if b <= prev || b >= len {
                return Err(CloudError::InvalidScanlineBreak { index: b, len });
            }
            prev = b;
        }
        Ok(())
    }

    /// Index ranges of the individual scan lines.
    pub fn scanlines(&self) -> Vec<std::ops::Range<usize>> {
        if self.points.is_empty() {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(self.scanline_breaks.len() + 1);
        let mut start = 0;
        for &b in &self.scanline_breaks {
            out.push(start..b);
            start = b;
        }
        out.push(start..self.points.len());
        out
    }

    /// Axis-aligned bounding box `(min, max)`; `None` for an empty cloud.
    pub fn bounds(&self) -> Option<(Vector3<f64>, Vector3<f64>)> {
        let first = *self.points.first()?;
        Some(self.points.iter().fold((first, first), |(lo, hi), p| {
            (lo.inf(p), hi.sup(p))
        }))
    }
}

/// World-frame cloud with one terrain/non-terrain label per point.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCloud {
    pub cloud: PointCloud,
    pub labels: Vec<Label>,
}

impl LabeledCloud {
    pub fn new(cloud: PointCloud, labels: Vec<Label>) -> Result<Self, CloudError> {
        if cloud.len() != labels.len() {
            return Err(CloudError::LabelCountMismatch {
                labels: labels.len(),
                points: cloud.len(),
            });
        }
        Ok(Self { cloud, labels })
    }

    pub fn empty() -> Self {
        Self {
            cloud: PointCloud::empty(Frame::World),
            labels: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Points carrying `label`, in order. Scan line structure is dropped.
    pub fn select(&self, label: Label) -> PointCloud {
        let points = self
            .cloud
            .points
            .iter()
            .zip(&self.labels)
            .filter(|(_, l)| **l == label)
            .map(|(p, _)| *p)
            .collect();
        PointCloud::new(points, self.cloud.frame)
    }

    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|l| **l == label).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scanline_validation() {
        let pts = vec![Vector3::zeros(); 5];
        let mut c = PointCloud::new(pts, Frame::World);
        c.scanline_breaks = vec![2, 4];
        assert!(c.validate().is_ok());
        assert_eq!(c.scanlines(), vec![0..2, 2..4, 4..5]);
        c.scanline_breaks = vec![2, 2];
        assert!(c.validate().is_err());
        c.scanline_breaks = vec![5];
        assert!(c.validate().is_err());
        c.scanline_breaks = vec![0];
        assert!(c.validate().is_err());
    }

    #[test]
    fn label_mismatch_rejected() {
        let c = PointCloud::new(vec![Vector3::zeros(); 2], Frame::World);
        assert!(LabeledCloud::new(c, vec![Label::Terrain]).is_err());
    }
}
