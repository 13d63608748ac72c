//! Regenerates `include/forage.h` whenever the exported surface changes.

use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").expect("cargo sets manifest dir"));
    cbindgen::generate(&crate_dir)
        .expect("C header generation")
        .write_to_file(crate_dir.join("include").join("forage.h"));
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
}
