use std::path::{Path, PathBuf};

use super::{parse_problem, ParseError, Problem, Source, Statement};

/// Locates and reads included files. The default implementation reads
/// from disk; tests substitute an in-memory table.
pub trait IncludeResolver {
    fn read(&self, path: &Path) -> Option<String>;
}

struct Disk;

impl IncludeResolver for Disk {
    fn read(&self, path: &Path) -> Option<String> {
        std::fs::read_to_string(path).ok()
    }
}

/// Expands include directives depth-first, in place. Lookup order is the
/// including file's directory, then each of `p.include_paths`.
pub fn resolve_includes(p: &Problem) -> Result<Problem, ParseError> {
    resolve_with(p, &Disk)
}

pub fn resolve_with(p: &Problem, fs: &dyn IncludeResolver) -> Result<Problem, ParseError> {
    let mut stack = vec![p.origin.clone()];
    let statements = expand(p, fs, &p.include_paths, &mut stack)?;
    let out = Problem { origin: p.origin.clone(), statements, include_paths: p.include_paths.clone() };
    out.validate()?;
    Ok(out)
}

fn expand(
    p: &Problem,
    fs: &dyn IncludeResolver,
    dirs: &[PathBuf],
    stack: &mut Vec<PathBuf>,
) -> Result<Vec<Statement>, ParseError> {
    let mut out = Vec::new();
    for s in &p.statements {
        match s {
            Statement::Formula(_) => out.push(s.clone()),
            Statement::Include { path, source } => {
                let (found, text) = locate(path, &p.origin, dirs, fs, source)?;
                if stack.iter().any(|q| same_file(q, &found)) {
                    let mut cycle: Vec<String> = stack.iter().map(|q| q.display().to_string()).collect();
                    cycle.push(found.display().to_string());
                    return Err(ParseError::IncludeCycle { cycle });
                }
                let child = parse_problem(&text, &found)?;
                stack.push(found);
                let inner = expand(&child, fs, dirs, stack)?;
                stack.pop();
                out.extend(inner);
            }
        }
    }
    Ok(out)
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

fn locate(
    name: &str,
    including: &Path,
    dirs: &[PathBuf],
    fs: &dyn IncludeResolver,
    source: &Source,
) -> Result<(PathBuf, String), ParseError> {
    let mut candidates = Vec::new();
    let base = including.parent().map(Path::to_path_buf).unwrap_or_default();
    candidates.push(base.join(name));
    candidates.extend(dirs.iter().map(|d| d.join(name)));
    for c in &candidates {
        if let Some(text) = fs.read(c) {
            return Ok((c.clone(), text));
        }
    }
    Err(ParseError::IncludeNotFound {
        file: name.to_owned(),
        searched: candidates.iter().map(|c| c.display().to_string()).collect(),
        source_pos: source.to_string(),
    })
}
