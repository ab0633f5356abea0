//! Operand ordering for n-ary sums and products. Sizes are re-measured on
//! every intermediate result; ties go to the leftmost candidate.

use crate::error::Result;

/// Huffman-style reduction: repeatedly combines the two smallest operands.
/// The pair is passed to `combine` in their current left-to-right order and
/// the result takes the left operand's place.
pub fn huffman_sum<T>(
    mut items: Vec<T>,
    size: impl Fn(&T) -> u64,
    mut combine: impl FnMut(T, T) -> Result<T>,
) -> Result<T> {
    assert!(!items.is_empty(), "sum needs an operand");
    let mut sizes: Vec<u64> = items.iter().map(&size).collect();
    while items.len() > 1 {
        let mut first = 0;
        let mut second = 1;
        if sizes[second] < sizes[first] {
            std::mem::swap(&mut first, &mut second);
        }
        for k in 2..sizes.len() {
            if sizes[k] < sizes[first] {
                second = first;
                first = k;
            } else if sizes[k] < sizes[second] {
                second = k;
            }
        }
        let (lo, hi) = (first.min(second), first.max(second));
        let b = items.remove(hi);
        sizes.remove(hi);
        let a = items.remove(lo);
        let c = combine(a, b)?;
        sizes[lo] = size(&c);
        items.insert(lo, c);
    }
    Ok(items.pop().unwrap())
}

/// Greedy chain contraction: repeatedly combines the adjacent pair with the
/// smallest size sum. Operand order is never changed.
pub fn greedy_product<T>(
    mut items: Vec<T>,
    size: impl Fn(&T) -> u64,
    mut combine: impl FnMut(T, T) -> Result<T>,
) -> Result<T> {
    assert!(!items.is_empty(), "product needs an operand");
    let mut sizes: Vec<u64> = items.iter().map(&size).collect();
    while items.len() > 1 {
        let i = (0..items.len() - 1)
            .min_by_key(|&i| (sizes[i] + sizes[i + 1], i))
            .unwrap();
        let b = items.remove(i + 1);
        sizes.remove(i + 1);
        let a = items.remove(i);
        let c = combine(a, b)?;
        sizes[i] = size(&c);
        items.insert(i, c);
    }
    Ok(items.pop().unwrap())
}

/// Plain left-to-right fold.
pub fn left_fold<T>(items: Vec<T>, mut combine: impl FnMut(T, T) -> Result<T>) -> Result<T> {
    let mut it = items.into_iter();
    let mut acc = it.next().expect("fold needs an operand");
    for x in it {
        acc = combine(acc, x)?;
    }
    Ok(acc)
}
