use super::FieldError;

/// Sampling of the unit channel `(0,1)^3`.
///
/// Horizontal nodes are uniform on `[0,1)`. Vertical nodes are the
/// type-I cosine/sine collocation set `z_j = j / (nz - 1)`, `j = 0..nz`,
/// which includes both walls; on the evenly/oddly extended period `[0,2)`
/// they form a uniform periodic grid of `2 (nz - 1)` points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Result<Self, FieldError> {
        if nx < 8 || ny < 8 || !nx.is_multiple_of(2) || !ny.is_multiple_of(2) {
            return Err(FieldError::InvalidGrid(format!(
                "horizontal counts must be even and >= 8, got nx={nx} ny={ny}"
            )));
        }
        if nz < 5 {
            return Err(FieldError::InvalidGrid(format!("nz must be >= 5, got {nz}")));
        }
        Ok(Self { nx, ny, nz })
    }

    /// Number of samples (and of stored coefficients).
    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn plane_len(&self) -> usize {
        self.nx * self.ny
    }

    /// Highest vertical mode index, `nz - 1`.
    pub fn top_mode(&self) -> usize {
        self.nz - 1
    }

    /// Flat index; the vertical index runs fastest.
    #[inline]
    pub fn idx(&self, ix: usize, iy: usize, k: usize) -> usize {
        (ix * self.ny + iy) * self.nz + k
    }

    #[inline]
    pub fn x(&self, ix: usize) -> f64 {
        ix as f64 / self.nx as f64
    }

    #[inline]
    pub fn y(&self, iy: usize) -> f64 {
        iy as f64 / self.ny as f64
    }

    #[inline]
    pub fn z(&self, j: usize) -> f64 {
        j as f64 / self.top_mode() as f64
    }

    #[inline]
    pub fn kx(&self, ix: usize) -> i64 {
        signed_wavenumber(ix, self.nx)
    }

    #[inline]
    pub fn ky(&self, iy: usize) -> i64 {
        signed_wavenumber(iy, self.ny)
    }

    /// Storage index of the horizontal wavenumber `k`, if stored.
    pub fn kx_index(&self, k: i64) -> Option<usize> {
        wavenumber_index(k, self.nx)
    }

    pub fn ky_index(&self, k: i64) -> Option<usize> {
        wavenumber_index(k, self.ny)
    }

    /// Trapezoid weight of vertical node `j` (sums to one).
    #[inline]
    pub fn z_weight(&self, j: usize) -> f64 {
        let h = 1.0 / self.top_mode() as f64;
        if j == 0 || j == self.top_mode() {
            0.5 * h
        } else {
            h
        }
    }

    /// Quadrature weight of one physical sample of a 3D field.
    #[inline]
    pub fn node_weight(&self, j: usize) -> f64 {
        self.z_weight(j) / self.plane_len() as f64
    }

    /// Same horizontal sampling, different vertical count.
    pub fn with_nz(&self, nz: usize) -> Result<Self, FieldError> {
        Self::new(self.nx, self.ny, nz)
    }

    /// Grid with every direction refined by `factor` (vertical intervals scaled).
    pub fn refined(&self, factor: usize) -> Result<Self, FieldError> {
        Self::new(self.nx * factor, self.ny * factor, self.top_mode() * factor + 1)
    }
}

impl std::fmt::Display for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}x{}", self.nx, self.ny, self.nz)
    }
}

/// FFT storage index to signed wavenumber; index `n/2` maps to `-n/2`.
#[inline]
pub(crate) fn signed_wavenumber(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

pub(crate) fn wavenumber_index(k: i64, n: usize) -> Option<usize> {
    let half = (n / 2) as i64;
    if k >= half || k < -half {
        // +n/2 aliases onto the stored -n/2 slot
        if k == half {
            return Some(n / 2);
        }
        return None;
    }
    Some(if k >= 0 { k as usize } else { (k + n as i64) as usize })
}

/// Vertical parity of a field under the reflection `z -> -z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    /// Cosine series `cos(m pi z)`, `m = 0..nz`.
    EvenZ,
    /// Sine series `sin(m pi z)`, `m = 1..nz-1`.
    OddZ,
}

impl Parity {
    /// Parity of the z-derivative.
    pub fn flip(self) -> Self {
        match self {
            Parity::EvenZ => Parity::OddZ,
            Parity::OddZ => Parity::EvenZ,
        }
    }

    /// Parity of a pointwise product.
    pub fn product(self, other: Self) -> Self {
        if self == other {
            Parity::EvenZ
        } else {
            Parity::OddZ
        }
    }

    /// Whether vertical mode `m` may be nonzero on a grid with top mode `top`.
    #[inline]
    pub fn allows(self, m: usize, top: usize) -> bool {
        match self {
            Parity::EvenZ => m <= top,
            Parity::OddZ => m >= 1 && m < top,
        }
    }

    /// Basis function `cos(m pi z)` or `sin(m pi z)`.
    #[inline]
    pub fn basis(self, m: usize, z: f64) -> f64 {
        let arg = m as f64 * std::f64::consts::PI * z;
        match self {
            Parity::EvenZ => arg.cos(),
            Parity::OddZ => arg.sin(),
        }
    }

    /// Discrete squared norm of vertical mode `m` under trapezoid quadrature.
    ///
    /// Equals the continuous `int_0^1 basis^2 dz` except for the top cosine,
    /// which the collocation set sees as `(-1)^j` with unit mean square.
    #[inline]
    pub fn mode_weight(self, m: usize, top: usize) -> f64 {
        match self {
            Parity::EvenZ if m == 0 || m == top => 1.0,
            _ => 0.5,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::EvenZ => "even",
            Parity::OddZ => "odd",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "even" => Some(Parity::EvenZ),
            "odd" => Some(Parity::OddZ),
            _ => None,
        }
    }
}
