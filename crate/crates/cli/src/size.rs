/// Parses a byte count such as `3612000`, `128MiB`, `128MB` or `1mb`.
/// All multiplier suffixes are binary: `1MB` is 1,048,576 bytes.
pub fn parse_size(text: &str) -> Result<u64, String> {
    let t = text.trim();
    let split = t.find(|c: char| !c.is_ascii_digit()).unwrap_or(t.len());
    let (digits, suffix) = t.split_at(split);
    if digits.is_empty() {
        return Err(format!("`{text}` is not a byte size"));
    }
    let n: u64 = digits.parse().map_err(|_| format!("`{text}` is too large"))?;
    let shift = match suffix.trim().to_ascii_lowercase().as_str() {
        "" | "b" => 0,
        "k" | "kb" | "kib" => 10,
        "m" | "mb" | "mib" => 20,
        "g" | "gb" | "gib" => 30,
        other => return Err(format!("unknown size suffix `{other}` in `{text}`")),
    };
    n.checked_mul(1u64 << shift)
        .ok_or_else(|| format!("`{text}` overflows 64 bits"))
}

/// Parses `lo,hi` into a pair of reals.
pub fn parse_bounds(text: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = text
        .split_once(',')
        .ok_or_else(|| format!("expected `lo,hi`, got `{text}`"))?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower bound `{lo}`"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper bound `{hi}`"))?;
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(format!("bounds must be finite with lo < hi, got `{text}`"));
    }
    Ok((lo, hi))
}
