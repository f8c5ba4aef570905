fn main() {
    std::process::exit(jtriple::run(std::env::args_os().skip(1)));
}
