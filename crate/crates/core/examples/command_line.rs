//! Driving the command-line front end in process.

use rpsp::cli;
use rpsp::generate::{generate, InstanceConfig};

fn main() -> rpsp::Result<()> {
    let dir = std::env::temp_dir().join("rpsp-example");
    std::fs::create_dir_all(&dir)?;
    let instance = dir.join("instance.json");
    let record = dir.join("record.json");
    generate(&InstanceConfig::new(12, 8, 8, 0.4, 5))?.write(&instance)?;
    let (i, r) = (instance.to_str().unwrap(), record.to_str().unwrap());

    let mut out = std::io::stdout();
    let mut err = std::io::stderr();
    for args in [vec!["rpsp", "solve", i, "-o", r], vec!["rpsp", "check", i, r], vec!["rpsp", "export-lp", i, "--relaxed"]] {
        let code = cli::run(args.clone(), None, &mut out, &mut err);
        println!("`{}` exited with {code}", args[1..].join(" "));
    }
    Ok(())
}
