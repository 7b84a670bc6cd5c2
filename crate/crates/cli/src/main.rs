fn main() {
    std::process::exit(lp_tile_lab::main_with_args(std::env::args_os()));
}
