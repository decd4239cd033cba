//! Plain-text number formatting.

/// Formats `x` with `digits` significant digits, switching to scientific
/// notation for very small or very large magnitudes.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exponent = x.abs().log10().floor() as i32;
    if !(-4..15).contains(&exponent) {
        return format!("{:.*e}", digits.saturating_sub(1), x);
    }
    let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
    let text = format!("{x:.decimals$}");
    if text.contains('.') {
        text.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        text
    }
}

/// Angle display in radians, or degrees when requested.
#[derive(Debug, Clone, Copy)]
pub struct Angles {
    pub degrees: bool,
}

impl Angles {
    pub fn show(self, radians: f64) -> String {
        if self.degrees {
            format!("{} deg", sig(radians.to_degrees(), 12))
        } else {
            sig(radians, 12)
        }
    }

    pub fn value(self, radians: f64) -> f64 {
        if self.degrees {
            radians.to_degrees()
        } else {
            radians
        }
    }
}
