//! Complex literals on the command line: `1.5`, `-2i`, `0.3+0.4i`, `1e-3-2e2i`.

use qseries::ComplexScalar;

pub fn parse_complex(s: &str) -> Result<ComplexScalar, String> {
    let t = s.trim();
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    let bad = || format!("invalid complex literal '{s}' (expected a, bi or a+bi)");
    let Some(body) = t.strip_suffix('i') else {
        return t.parse().map(|re| ComplexScalar::new(re, 0.0)).map_err(|_| bad());
    };
    // the imaginary part starts at the last sign that is not an exponent sign
    let split = body
        .char_indices()
        .filter(|&(i, c)| (c == '+' || c == '-') && i > 0)
        .filter(|&(i, _)| !matches!(body.as_bytes()[i - 1], b'e' | b'E'))
        .map(|(i, _)| i)
        .next_back();
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.parse().map_err(|_| bad())?;
    Ok(ComplexScalar::new(re, im))
}

/// Comma-separated complex literals; the empty string is the empty list.
pub fn parse_list(s: &str) -> Result<Vec<ComplexScalar>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_complex).collect()
}

/// A value with 17 significant digits per component.
pub fn format_complex(z: ComplexScalar) -> String {
    format!("{:.16e} {:+.16e}i", z.re, z.im)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> ComplexScalar {
        ComplexScalar::new(re, im)
    }

    #[test]
    fn literals() {
        assert_eq!(parse_complex("1.5"), Ok(c(1.5, 0.0)));
        assert_eq!(parse_complex("-0.25"), Ok(c(-0.25, 0.0)));
        assert_eq!(parse_complex("0.3+0.4i"), Ok(c(0.3, 0.4)));
        assert_eq!(parse_complex("0.3-0.4i"), Ok(c(0.3, -0.4)));
        assert_eq!(parse_complex("-2i"), Ok(c(0.0, -2.0)));
        assert_eq!(parse_complex("i"), Ok(c(0.0, 1.0)));
        assert_eq!(parse_complex("1-i"), Ok(c(1.0, -1.0)));
        assert_eq!(parse_complex("1e-3-2e+2i"), Ok(c(1e-3, -200.0)));
        assert_eq!(parse_complex(" 2E-1+1E-1i "), Ok(c(0.2, 0.1)));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "abc", "1+2", "1+2j", "1++2i", "i1"] {
            assert!(parse_complex(s).is_err(), "{s}");
        }
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list(""), Ok(vec![]));
        assert_eq!(parse_list("0.5,1-i"), Ok(vec![c(0.5, 0.0), c(1.0, -1.0)]));
        assert!(parse_list("0.5,").is_err());
    }

    #[test]
    fn round_trips() {
        let z = c(0.1 + 0.2, -1.0 / 3.0);
        let s = format_complex(z).replace(' ', "");
        assert_eq!(parse_complex(&s), Ok(z));
    }
}
