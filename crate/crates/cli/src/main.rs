fn main() {
    eprintln!("liepair: not yet wired up");
    std::process::exit(5);
}
