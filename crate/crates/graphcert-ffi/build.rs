fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").expect("manifest dir");
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    match cbindgen::generate(&crate_dir) {
        Ok(bindings) => {
            bindings.write_to_file(format!("{crate_dir}/include/graphcert.h"));
        }
        Err(e) => {
            // header generation failing should not mask compile errors
            println!("cargo:warning=cbindgen failed: {e}");
        }
    }
}
