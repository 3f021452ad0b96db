//! Number formatting in the style of R's `print` for numeric vectors.
//!
//! Every element gets enough significant digits (at most `digits`) to be
//! shown to that precision, trailing zeros dropped; the vector then shares
//! one number of decimals. Scientific notation is used when it is narrower.

struct Shape {
    /// Significant digits needed after dropping trailing zeros.
    sig: usize,
    /// Decimal exponent of the rounded value.
    exp: i32,
}

fn shape(x: f64, digits: usize) -> Shape {
    if x == 0.0 {
        return Shape { sig: 1, exp: 0 };
    }
    let s = format!("{:.*e}", digits - 1, x.abs());
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sig = mantissa.trim_end_matches('0').trim_end_matches('.').replace('.', "").len();
    Shape { sig, exp }
}

fn sci(x: f64, mantissa_digits: usize) -> String {
    let s = format!("{:.*e}", mantissa_digits.saturating_sub(1), x);
    let (m, e) = s.split_once('e').expect("exponent form");
    let (sign, e) = match e.strip_prefix('-') {
        Some(rest) => ('-', rest),
        None => ('+', e),
    };
    format!("{m}e{sign}{e:0>2}")
}

/// Formats a vector of values with a shared layout.
pub fn format_values(values: &[f64], digits: usize) -> Vec<String> {
    let digits = digits.clamp(1, 17);
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.is_empty() {
        return values.iter().map(|v| special(*v)).collect();
    }
    let shapes: Vec<Shape> = finite.iter().map(|&x| shape(x, digits)).collect();
    let neg = finite.iter().any(|x| *x < 0.0) as usize;

    let decimals = shapes
        .iter()
        .map(|s| (s.sig as i32 - 1 - s.exp).max(0) as usize)
        .max()
        .unwrap_or(0);
    let left = shapes.iter().map(|s| (s.exp + 1).max(1) as usize).max().unwrap_or(1);
    let fixed_width = neg + left + if decimals > 0 { decimals + 1 } else { 0 };

    let max_sig = shapes.iter().map(|s| s.sig).max().unwrap_or(1);
    let exp_digits = if shapes.iter().any(|s| s.exp.abs() >= 100) { 3 } else { 2 };
    let sci_width = neg + if max_sig > 1 { max_sig + 1 } else { 1 } + 2 + exp_digits;

    values
        .iter()
        .map(|&v| {
            if !v.is_finite() {
                special(v)
            } else if fixed_width <= sci_width {
                format!("{v:.decimals$}")
            } else {
                sci(v, max_sig)
            }
        })
        .collect()
}

pub fn format_value(x: f64, digits: usize) -> String {
    format_values(&[x], digits).remove(0)
}

fn special(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "Inf".into()
    } else {
        "-Inf".into()
    }
}
