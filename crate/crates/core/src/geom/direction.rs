use std::fmt;

use crate::error::GeomError;

/// Integer direction vector.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vector {
    pub x: i64,
    pub y: i64,
}

impl Vector {
    pub const fn new(x: i64, y: i64) -> Self {
        Vector { x, y }
    }

    /// Clockwise quarter turn, `(x, y) -> (y, -x)`.
    pub const fn perp(self) -> Vector {
        Vector::new(self.y, -self.x)
    }

    pub const fn neg(self) -> Vector {
        Vector::new(-self.x, -self.y)
    }

    pub fn cross(self, other: Vector) -> i128 {
        self.x as i128 * other.y as i128 - self.y as i128 * other.x as i128
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// The `d` edge directions `v_1 .. v_d` together with their negations.
///
/// Indices are 0-based internally (`dir(0)` is the vertical-up direction) and
/// always taken modulo `2d`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DirectionSystem {
    vectors: Vec<Vector>,
}

impl DirectionSystem {
    /// Builds the system from `v_1 .. v_d`.
    ///
    /// `v_1` must be `(0, 1)`; `v_2 .. v_d` must point to the left and be in
    /// counterclockwise order, so that the edges `e_1 .. e_2d` of every
    /// polygon form a positively oriented closed curve.
    pub fn new(base: &[Vector]) -> Result<Self, GeomError> {
        let d = base.len();
        if d < 2 {
            return Err(GeomError::InvalidDirections(format!("need d >= 2, got {d}")));
        }
        if base[0] != Vector::new(0, 1) {
            return Err(GeomError::InvalidDirections(format!("v_1 must be (0, 1), got {:?}", base[0])));
        }
        for (k, v) in base.iter().enumerate().skip(1) {
            if v.x >= 0 {
                return Err(GeomError::InvalidDirections(format!("v_{} = {:?} does not point to the left", k + 1, v)));
            }
        }
        for k in 1..d - 1 {
            if base[k].cross(base[k + 1]) <= 0 {
                return Err(GeomError::InvalidDirections(format!(
                    "v_{} = {:?} and v_{} = {:?} are not in counterclockwise order",
                    k + 1,
                    base[k],
                    k + 2,
                    base[k + 1]
                )));
            }
        }
        let mut vectors = base.to_vec();
        vectors.extend(base.iter().map(|v| v.neg()));
        Ok(DirectionSystem { vectors })
    }

    /// Axis-parallel system: `v_1 = (0, 1)`, `v_2 = (-1, 0)`.
    pub fn axis() -> Self {
        DirectionSystem::new(&[Vector::new(0, 1), Vector::new(-1, 0)]).expect("valid")
    }

    pub fn d(&self) -> usize {
        self.vectors.len() / 2
    }

    /// Number of edge directions, `2d`.
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn idx(&self, i: usize) -> usize {
        i % self.vectors.len()
    }

    pub fn dir(&self, i: usize) -> Vector {
        self.vectors[self.idx(i)]
    }

    /// Outer normal `v_i^perp` of the edge in direction `v_i`.
    pub fn normal(&self, i: usize) -> Vector {
        self.dir(i).perp()
    }

    pub fn opposite(&self, i: usize) -> usize {
        self.idx(i + self.d())
    }

    pub fn base(&self) -> &[Vector] {
        &self.vectors[..self.d()]
    }

    /// Index of the direction parallel to `v` (either orientation), if any.
    pub fn parallel_index(&self, v: Vector) -> Option<usize> {
        (0..self.d()).find(|&k| self.vectors[k].cross(v) == 0)
    }

    /// Index of the direction equal to `v` up to a positive factor.
    pub fn index_of(&self, v: Vector) -> Option<usize> {
        (0..self.len()).find(|&k| {
            let w = self.vectors[k];
            w.cross(v) == 0 && (w.x as i128 * v.x as i128 + w.y as i128 * v.y as i128) > 0
        })
    }
}

impl fmt::Debug for DirectionSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.base()).finish()
    }
}
