use std::path::PathBuf;

/// Directory named by `DOCAMR_DATA`, if set.
pub(crate) fn data_dir() -> Option<PathBuf> {
    std::env::var_os("DOCAMR_DATA").map(PathBuf::from)
}

/// Text of a data file: `$DOCAMR_DATA/<name>` when present, else the
/// bundled copy.
pub(crate) fn load_text(name: &str, bundled: &'static str) -> crate::Result<(String, String)> {
    if let Some(dir) = data_dir() {
        let path = dir.join(name);
        if path.exists() {
            let text = std::fs::read_to_string(&path).map_err(|e| crate::Error::io(&path, e))?;
            return Ok((path.display().to_string(), text));
        }
    }
    Ok((format!("<bundled {name}>"), bundled.to_string()))
}

/// Non-empty, non-comment lines split on the first tab.
pub(crate) fn tsv_pairs<'a>(source: &'a str, text: &'a str) -> impl Iterator<Item = crate::Result<(usize, &'a str, &'a str)>> + 'a {
    text.lines().enumerate().filter_map(move |(i, line)| {
        let line = line.trim_end();
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            return None;
        }
        Some(match line.split_once('\t') {
            Some((a, b)) if !a.trim().is_empty() && !b.trim().is_empty() => Ok((i + 1, a.trim(), b.trim())),
            _ => Err(crate::Error::Data {
                path: source.to_string(),
                message: format!("line {}: expected two tab-separated fields", i + 1),
            }),
        })
    })
}
