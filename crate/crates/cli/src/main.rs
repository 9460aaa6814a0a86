fn main() { println!("salem-forge"); }
