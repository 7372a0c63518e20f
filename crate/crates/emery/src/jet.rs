//! Truncated Taylor arithmetic: value plus all partial derivatives up to
//! order 3 at a point, propagated forward through arithmetic in one pass.
//!
//! Second and third derivative blocks are stored once per sorted multi-index,
//! so symmetry under index permutation is exact by construction. Order is
//! fixed at 3 for every consumer: curvature needs two metric derivatives and
//! the divergence-type checks need one more level below that.

/// Number of sorted pairs i <= j < n.
pub fn len2(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Number of sorted triples i <= j <= k < n.
pub fn len3(n: usize) -> usize {
    n * (n + 1) * (n + 2) / 6
}

/// Linear index of the sorted pair (i, j), i <= j, in an n-dimensional jet.
#[inline]
pub fn idx2(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * (2 * n - i + 1) / 2 + (j - i)
}

/// Linear index of the sorted triple (i, j, k) in an n-dimensional jet.
#[inline]
pub fn idx3(n: usize, i: usize, j: usize, k: usize) -> usize {
    let mut v = [i, j, k];
    v.sort_unstable();
    let (i, j, k) = (v[0], v[1], v[2]);
    // triples starting below i, then pairs (j,k) within the trailing block
    let mut base = 0;
    for a in 0..i {
        base += len2(n - a);
    }
    let m = n - i;
    base + (j - i) * m - (j - i) * ((j - i).saturating_sub(1)) / 2 + (k - j)
}

/// Value and exact partial derivatives of a scalar quantity up to order 3.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    n: usize,
    pub value: f64,
    d1: Vec<f64>,
    d2: Vec<f64>,
    d3: Vec<f64>,
}

impl Jet {
    pub fn constant(n: usize, value: f64) -> Self {
        Jet {
            n,
            value,
            d1: vec![0.0; n],
            d2: vec![0.0; len2(n)],
            d3: vec![0.0; len3(n)],
        }
    }

    /// Jet of the coordinate function x^index evaluated at `value`.
    pub fn coordinate(n: usize, index: usize, value: f64) -> Self {
        assert!(index < n);
        let mut j = Jet::constant(n, value);
        j.d1[index] = 1.0;
        j
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d1(&self, i: usize) -> f64 {
        self.d1[i]
    }

    #[inline]
    pub fn d2(&self, i: usize, j: usize) -> f64 {
        self.d2[idx2(self.n, i, j)]
    }

    #[inline]
    pub fn d3(&self, i: usize, j: usize, k: usize) -> f64 {
        self.d3[idx3(self.n, i, j, k)]
    }

    pub fn add(&self, o: &Jet) -> Jet {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        self.zip(o, |a, b| a - b)
    }

    pub fn neg(&self) -> Jet {
        self.map(|a| -a)
    }

    pub fn scale(&self, c: f64) -> Jet {
        self.map(|a| c * a)
    }

    fn zip(&self, o: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        assert_eq!(self.n, o.n, "jet dimension mismatch");
        Jet {
            n: self.n,
            value: f(self.value, o.value),
            d1: self.d1.iter().zip(&o.d1).map(|(a, b)| f(*a, *b)).collect(),
            d2: self.d2.iter().zip(&o.d2).map(|(a, b)| f(*a, *b)).collect(),
            d3: self.d3.iter().zip(&o.d3).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Jet {
        Jet {
            n: self.n,
            value: f(self.value),
            d1: self.d1.iter().map(|a| f(*a)).collect(),
            d2: self.d2.iter().map(|a| f(*a)).collect(),
            d3: self.d3.iter().map(|a| f(*a)).collect(),
        }
    }

    /// Leibniz product rule through order 3.
    pub fn mul(&self, o: &Jet) -> Jet {
        assert_eq!(self.n, o.n, "jet dimension mismatch");
        let n = self.n;
        let (a, b) = (self, o);
        let mut out = Jet::constant(n, a.value * b.value);
        for i in 0..n {
            out.d1[i] = a.value * b.d1[i] + a.d1[i] * b.value;
        }
        let mut p = 0;
        for i in 0..n {
            for j in i..n {
                out.d2[p] = a.value * b.d2[p]
                    + a.d1[i] * b.d1[j]
                    + a.d1[j] * b.d1[i]
                    + a.d2[p] * b.value;
                p += 1;
            }
        }
        let mut q = 0;
        for i in 0..n {
            for j in i..n {
                let p_ij = idx2(n, i, j);
                for k in j..n {
                    let p_jk = idx2(n, j, k);
                    let p_ik = idx2(n, i, k);
                    out.d3[q] = a.value * b.d3[q]
                        + a.d3[q] * b.value
                        + a.d1[i] * b.d2[p_jk]
                        + a.d1[j] * b.d2[p_ik]
                        + a.d1[k] * b.d2[p_ij]
                        + a.d2[p_jk] * b.d1[i]
                        + a.d2[p_ik] * b.d1[j]
                        + a.d2[p_ij] * b.d1[k];
                    q += 1;
                }
            }
        }
        out
    }

    /// Composition with a scalar function given its derivatives at
    /// `self.value`: returns h(self) where c = [h, h', h'', h'''].
    pub fn chain(&self, c: [f64; 4]) -> Jet {
        let n = self.n;
        let f = self;
        let mut out = Jet::constant(n, c[0]);
        for i in 0..n {
            out.d1[i] = c[1] * f.d1[i];
        }
        let mut p = 0;
        for i in 0..n {
            for j in i..n {
                out.d2[p] = c[2] * f.d1[i] * f.d1[j] + c[1] * f.d2[p];
                p += 1;
            }
        }
        let mut q = 0;
        for i in 0..n {
            for j in i..n {
                let p_ij = idx2(n, i, j);
                for k in j..n {
                    let p_jk = idx2(n, j, k);
                    let p_ik = idx2(n, i, k);
                    out.d3[q] = c[3] * f.d1[i] * f.d1[j] * f.d1[k]
                        + c[2]
                            * (f.d2[p_ij] * f.d1[k]
                                + f.d2[p_ik] * f.d1[j]
                                + f.d2[p_jk] * f.d1[i])
                        + c[1] * f.d3[q];
                    q += 1;
                }
            }
        }
        out
    }

    /// 1/self; caller guarantees self.value != 0.
    pub fn recip(&self) -> Jet {
        let v = self.value;
        let v2 = v * v;
        self.chain([1.0 / v, -1.0 / v2, 2.0 / (v2 * v), -6.0 / (v2 * v2)])
    }

    pub fn div(&self, o: &Jet) -> Jet {
        self.mul(&o.recip())
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.chain([s, c, -s, -c])
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.chain([c, -s, -c, s])
    }

    pub fn exp(&self) -> Jet {
        let e = self.value.exp();
        self.chain([e, e, e, e])
    }

    /// Caller guarantees self.value > 0.
    pub fn ln(&self) -> Jet {
        let v = self.value;
        self.chain([v.ln(), 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v)])
    }

    /// Caller guarantees self.value > 0.
    pub fn sqrt(&self) -> Jet {
        let v = self.value;
        let r = v.sqrt();
        self.chain([r, 0.5 / r, -0.25 / (r * v), 0.375 / (r * v * v)])
    }

    pub fn sinh(&self) -> Jet {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain([s, c, s, c])
    }

    pub fn cosh(&self) -> Jet {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain([c, s, c, s])
    }

    pub fn tanh(&self) -> Jet {
        let t = self.value.tanh();
        let sech2 = 1.0 - t * t;
        self.chain([
            t,
            sech2,
            -2.0 * t * sech2,
            sech2 * (6.0 * t * t - 2.0),
        ])
    }

    /// self^e for a constant exponent. Integer exponents accept any base
    /// (subject to zero-division); fractional exponents require base > 0.
    /// Caller performs the domain checks.
    pub fn powc(&self, e: f64) -> Jet {
        let v = self.value;
        if e == 0.0 {
            return Jet::constant(self.n, 1.0);
        }
        let is_int = e.fract() == 0.0 && e.abs() < 1e15;
        let coef = |k: i32| -> f64 {
            // e (e-1) ... (e-k+1) * v^(e-k), with exact-zero fall-through
            // so that e.g. (x^2)''' = 0 never touches v^(-1).
            let mut fall = 1.0;
            for t in 0..k {
                fall *= e - t as f64;
            }
            if fall == 0.0 {
                return 0.0;
            }
            let ek = e - k as f64;
            let p = if is_int {
                powi_f(v, ek as i64)
            } else {
                v.powf(ek)
            };
            fall * p
        };
        self.chain([coef(0), coef(1), coef(2), coef(3)])
    }
}

fn powi_f(v: f64, e: i64) -> f64 {
    if e.abs() <= i32::MAX as i64 {
        v.powi(e as i32)
    } else {
        v.powf(e as f64)
    }
}

impl std::ops::Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        Jet::add(self, rhs)
    }
}

impl std::ops::Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        Jet::sub(self, rhs)
    }
}

impl std::ops::Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        Jet::mul(self, rhs)
    }
}
