//! The JSON files under `bundles/` are the serialised builtins. Regenerate them with
//! `NCDIFF_WRITE_BUNDLES=1 cargo test -p ncdiff-core --test bundles`.

use std::path::PathBuf;

use ncdiff::{builtins, Bundle, Geometry};

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../bundles")
}

#[test]
fn files_match_builtins() {
    let write = std::env::var_os("NCDIFF_WRITE_BUNDLES").is_some();
    for b in builtins::all() {
        let path = dir().join(format!("{}.json", b.name));
        let text = b.to_json() + "\n";
        if write {
            std::fs::create_dir_all(dir()).unwrap();
            std::fs::write(&path, &text).unwrap();
        }
        let on_disk = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(on_disk, text, "{} is stale", path.display());
    }
}

#[test]
fn files_load() {
    for name in builtins::NAMES {
        let path = dir().join(format!("{name}.json"));
        let b = Bundle::load(path.to_str().unwrap()).unwrap();
        assert_eq!(b.digest(), builtins::builtin(name).unwrap().digest());
        Geometry::from_bundle(&b, None).unwrap();
    }
}
