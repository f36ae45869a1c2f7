use nilzeta::cli::run_captured;

fn main() {
    let lattice = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/heisenberg.json");
    let (code, out) = run_captured([
        "nilzeta", "--workers", "2", "report", "--lattice", lattice, "--field", "Q(i)", "--n-bound", "2000", "--check-prime", "11",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    println!("exit {code}");
    println!("W = {}", v["W"]["display"]);
    println!("functional equation {}", v["functional_equation"]);
    println!("prediction at 11 {}", v["prediction_check"]["matches"]);
    println!("abscissa {}", v["abscissa"]);
    println!("asymptotics {}", v["asymptotics"]);
}
