use std::fs;
use std::path::Path;

use qjd_core::{ComplexMatrix, DensityState, HermitianObservable, Tolerances};

use crate::failure::Failure;

fn read_matrix(path: &Path) -> Result<ComplexMatrix, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn located(path: &Path, e: qjd_core::QjdError) -> Failure {
    match Failure::from(e) {
        Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
        other => other,
    }
}

/// Observable labelled by its file stem.
pub fn observable(path: &Path, tol: &Tolerances) -> Result<HermitianObservable, Failure> {
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    HermitianObservable::with_tolerances(read_matrix(path)?, label, tol)
        .map_err(|e| located(path, e))
}

pub fn observables(
    paths: &[impl AsRef<Path>],
    tol: &Tolerances,
) -> Result<Vec<HermitianObservable>, Failure> {
    if paths.is_empty() {
        return Err(Failure::Input("at least one --obs file is required".into()));
    }
    paths.iter().map(|p| observable(p.as_ref(), tol)).collect()
}

pub fn state(path: Option<&Path>, tol: &Tolerances) -> Result<DensityState, Failure> {
    let path = path.ok_or_else(|| Failure::Input("--state is required".into()))?;
    DensityState::with_tolerances(read_matrix(path)?, tol).map_err(|e| located(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn label_is_file_stem() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sigma_z.json");
        fs::File::create(&p)
            .unwrap()
            .write_all(br#"{"dim":2,"re":[[1,0],[0,-1]]}"#)
            .unwrap();
        let a = observable(&p, &Tolerances::default()).unwrap();
        assert_eq!(a.label(), "sigma_z");
    }

    #[test]
    fn missing_and_malformed_files_are_input_errors() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope.json");
        assert_eq!(
            observable(&missing, &Tolerances::default())
                .unwrap_err()
                .exit_code(),
            2
        );
        let bad = dir.path().join("bad.json");
        fs::write(&bad, r#"{"dim":2,"re":[[1,2],[0,1]]}"#).unwrap();
        let err = observable(&bad, &Tolerances::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("bad.json"));
        assert!(state(None, &Tolerances::default()).is_err());
    }
}
