use std::path::PathBuf;

use nilzeta::lattice::{self, LieLattice};

fn main() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus");
    for name in ["heisenberg", "heisenberg_plus_abelian", "free_class2_3gen", "filiform_class3", "bad_jacobi"] {
        let text = std::fs::read_to_string(dir.join(format!("{name}.json"))).unwrap();
        match LieLattice::from_json(&text) {
            Ok(lat) => {
                let g = lattice::global_basis(&lat);
                println!(
                    "{name}: rank {} class {} lcs {:?}, d = {}, k = {}, divisors {:?}, isolator index {}",
                    lat.rank(),
                    lat.class(),
                    lat.lower_central_ranks(),
                    g.d,
                    g.k,
                    g.divisors,
                    g.isolator_index
                );
            }
            Err(e) => println!("{name}: rejected, {e}"),
        }
    }
}
