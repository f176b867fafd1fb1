//! Driving the command-line front end in-process.

fn main() {
    let runs: [&[&str]; 4] = [
        &["pmstat", "dl", "--f", "eps:0.3", "--g", "eps0"],
        &["pmstat", "matrix-check", "--matrix", "cesaro", "--N", "1000"],
        &["pmstat", "density", "--set", "evens", "--ideal", "density:cesaro"],
        &["pmstat", "gamma", "--seq", "alternate:p,q:mod:3:0"],
    ];
    for argv in runs {
        println!("$ {}", argv[1..].join(" "));
        let code = pmstat::cli::dispatch(argv.iter().copied());
        println!("(exit {code})\n");
    }
}
