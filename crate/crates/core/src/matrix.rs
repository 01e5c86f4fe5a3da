use std::fmt;

/// Dense real symmetric matrix.
///
/// Both triangles are stored and every mutation goes through [`SymMatrix::set`]
/// or a whole-matrix operation that preserves symmetry, so the matrix is
/// exactly symmetric at all times. Storage is column-major, which coincides
/// with row-major for a symmetric matrix.
#[derive(Clone, PartialEq)]
pub struct SymMatrix {
    order: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(order: usize) -> Self {
        SymMatrix {
            order,
            data: vec![0.0; order * order],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds a matrix from `f(i, j)` evaluated on the upper triangle (`i <= j`).
    pub fn from_upper_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(order);
        for j in 0..order {
            for i in 0..=j {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Takes ownership of a full square buffer, keeping its upper triangle.
    pub fn from_full_upper(order: usize, mut data: Vec<f64>) -> Self {
        assert_eq!(data.len(), order * order);
        for j in 0..order {
            for i in 0..j {
                // column-major: (i, j) at j * order + i
                data[i * order + j] = data[j * order + i];
            }
        }
        SymMatrix { order, data }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.order + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.order + i] = v;
        self.data[i * self.order + j] = v;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, delta: f64) {
        let v = self.get(i, j) + delta;
        self.set(i, j, v);
    }

    /// Column-major view of all `order * order` entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.order, other.order);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn inner(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.order, other.order);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, alpha: f64, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.order, other.order);
        SymMatrix {
            order: self.order,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + alpha * b)
                .collect(),
        }
    }

    pub fn scaled(&self, alpha: f64) -> SymMatrix {
        SymMatrix {
            order: self.order,
            data: self.data.iter().map(|a| alpha * a).collect(),
        }
    }

    /// Leading principal submatrix of the given order.
    pub fn leading_block(&self, order: usize) -> SymMatrix {
        assert!(order <= self.order);
        SymMatrix::from_upper_fn(order, |i, j| self.get(i, j))
    }

    /// Matrix of order `order` holding `self` as its leading block and zeros elsewhere.
    pub fn embed(&self, order: usize) -> SymMatrix {
        assert!(order >= self.order);
        let mut m = SymMatrix::zeros(order);
        for j in 0..self.order {
            for i in 0..=j {
                m.set(i, j, self.get(i, j));
            }
        }
        m
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SymMatrix({})", self.order)?;
        for i in 0..self.order.min(12) {
            let row: Vec<String> = (0..self.order.min(12))
                .map(|j| format!("{:9.4}", self.get(i, j)))
                .collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        Ok(())
    }
}
