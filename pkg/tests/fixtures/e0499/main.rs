fn main() {
    let mut v = vec![1, 2, 3];
    let first = &mut v;
    let second = &mut v;
    first.push(4);
    second.push(5);
}
