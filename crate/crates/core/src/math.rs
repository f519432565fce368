//! Scalar float intrinsics, routed through `std` when available and `libm`
//! otherwise so the crate stays `no_std`-compatible.

macro_rules! shim1 {
    ($name:ident) => {
        #[inline(always)]
        pub(crate) fn $name(x: f64) -> f64 {
            #[cfg(feature = "std")]
            {
                x.$name()
            }
            #[cfg(not(feature = "std"))]
            {
                libm::$name(x)
            }
        }
    };
}

shim1!(sqrt);
shim1!(cbrt);
shim1!(sin);
shim1!(cos);
shim1!(acos);
shim1!(ceil);

#[inline(always)]
pub(crate) fn abs(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.abs()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::fabs(x)
    }
}

#[inline(always)]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.powf(y)
    }
    #[cfg(not(feature = "std"))]
    {
        libm::pow(x, y)
    }
}

#[inline(always)]
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    #[cfg(feature = "std")]
    {
        x.powi(n)
    }
    #[cfg(not(feature = "std"))]
    {
        let mut r = 1.0;
        let mut base = if n < 0 { 1.0 / x } else { x };
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                r *= base;
            }
            base *= base;
            e >>= 1;
        }
        r
    }
}

#[inline(always)]
pub(crate) fn sin_cos(x: f64) -> (f64, f64) {
    #[cfg(feature = "std")]
    {
        x.sin_cos()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::sincos(x)
    }
}

/// Unit phasor `exp(i*theta)`.
#[inline(always)]
pub(crate) fn cis(theta: f64) -> crate::C64 {
    let (s, c) = sin_cos(theta);
    crate::C64::new(c, s)
}
