//! Parsing of numeric grids given on the command line.

/// Parses `a:b:step` (inclusive of `b` up to rounding) or a comma list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let text = text.trim();
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("grid '{text}' must be a:b:step"));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("bad number '{s}': {e}"));
        let (a, b, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if step.is_nan() || step <= 0.0 || !a.is_finite() || !b.is_finite() || b < a {
            return Err(format!("grid '{text}' needs a ≤ b and step > 0"));
        }
        let count = ((b - a) / step + 1e-9).floor() as usize + 1;
        if count > 1_000_000 {
            return Err(format!("grid '{text}' has {count} points"));
        }
        Ok((0..count).map(|i| a + i as f64 * step).collect())
    } else {
        parse_list(text)
    }
}

/// Parses a nonempty comma-separated list of finite numbers.
pub fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    let values = text
        .split(',')
        .map(|s| {
            let x = s.trim().parse::<f64>().map_err(|e| format!("bad number '{s}': {e}"))?;
            if x.is_finite() { Ok(x) } else { Err(format!("'{s}' is not finite")) }
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err("empty list".into());
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_include_the_end() {
        let g = parse_grid("0:3:0.1").unwrap();
        assert_eq!(g.len(), 31);
        assert!((g[30] - 3.0).abs() < 1e-12);
        assert_eq!(parse_grid("1:1:0.5").unwrap(), vec![1.0]);
    }

    #[test]
    fn lists_and_errors() {
        assert_eq!(parse_grid("0.2, 0.5,0.8").unwrap(), vec![0.2, 0.5, 0.8]);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("a,b").is_err());
        assert!(parse_list("1,inf").is_err());
    }
}
