fn main() {
    let outer;
    {
        let inner = String::from("hi");
        outer = &inner;
    }
    let _n = outer.len();
}
