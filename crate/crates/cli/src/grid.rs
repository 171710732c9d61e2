//! `start:stop:step` ranges and comma-separated lists.

/// Inclusive arithmetic range. `stop` is included when it lies on the grid
/// to within a millionth of a step.
pub fn parse_range(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(format!("expected start:stop:step, got {text:?}"));
    };
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("bad number {s:?} in {text:?}"))
    };
    let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
    if !(step > 0.0) {
        return Err(format!("step must be positive in {text:?}"));
    }
    if !(stop > start) {
        return Err(format!("stop must exceed start in {text:?}"));
    }
    let n = ((stop - start) / step + 1e-6).floor();
    if n > 1e6 {
        return Err(format!("{text:?} has more than a million points"));
    }
    Ok((0..=n as usize).map(|i| start + i as f64 * step).collect())
}

pub fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("bad number {s:?} in list {text:?}"))
        })
        .collect()
}
