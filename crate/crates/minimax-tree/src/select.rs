//! Worst-case linear selection (median of medians, groups of five).
//!
//! The threshold search feeds adversarial inputs — long runs of equal
//! fractional parts are routine — so this uses the classic deterministic
//! scheme rather than a randomised pivot, and partitions three ways so equal
//! keys collapse into the pivot block instead of recursing on them.

use std::cmp::Ordering;

/// Reorders `items` so that position `k` holds the element that would be
/// there after a full sort by `cmp`, with everything smaller on its left and
/// everything larger on its right. Runs in O(n) worst case.
///
/// Panics if `items` is empty or `k` is out of bounds.
pub fn select_nth_by<T, F>(items: &mut [T], k: usize, cmp: &F)
where
    F: Fn(&T, &T) -> Ordering,
{
    assert!(k < items.len(), "selection index {k} out of bounds for {}", items.len());
    let mut slice = items;
    let mut k = k;
    loop {
        if slice.len() <= 5 {
            insertion_sort(slice, cmp);
            return;
        }
        let pivot_at = median_of_medians(slice, cmp);
        let (lt, gt) = partition_three_way(slice, pivot_at, cmp);
        if k < lt {
            slice = &mut slice[..lt];
        } else if k < gt {
            return; // inside the block of pivot-equal elements
        } else {
            slice = &mut slice[gt..];
            k -= gt;
        }
    }
}

fn insertion_sort<T, F>(items: &mut [T], cmp: &F)
where
    F: Fn(&T, &T) -> Ordering,
{
    for i in 1..items.len() {
        let mut j = i;
        while j > 0 && cmp(&items[j - 1], &items[j]) == Ordering::Greater {
            items.swap(j - 1, j);
            j -= 1;
        }
    }
}

/// Sorts each group of five in place, gathers the group medians at the front
/// of the slice, and recurses (via `select_nth_by`) for their median. Returns
/// the index of the chosen pivot.
fn median_of_medians<T, F>(items: &mut [T], cmp: &F) -> usize
where
    F: Fn(&T, &T) -> Ordering,
{
    let n = items.len();
    let mut medians = 0;
    let mut start = 0;
    while start < n {
        let end = (start + 5).min(n);
        insertion_sort(&mut items[start..end], cmp);
        let mid = start + (end - start - 1) / 2;
        items.swap(medians, mid);
        medians += 1;
        start = end;
    }
    select_nth_by(&mut items[..medians], (medians - 1) / 2, cmp);
    (medians - 1) / 2
}

/// Dutch-flag partition around the element at `pivot_at`. Returns `(lt, gt)`:
/// positions `[0, lt)` compare below the pivot, `[lt, gt)` equal, `[gt, n)`
/// above.
fn partition_three_way<T, F>(items: &mut [T], pivot_at: usize, cmp: &F) -> (usize, usize)
where
    F: Fn(&T, &T) -> Ordering,
{
    let last = items.len() - 1;
    items.swap(pivot_at, last);
    let mut lt = 0;
    let mut i = 0;
    let mut gt = last;
    while i < gt {
        match cmp(&items[i], &items[last]) {
            Ordering::Less => {
                items.swap(lt, i);
                lt += 1;
                i += 1;
            }
            Ordering::Equal => i += 1,
            Ordering::Greater => {
                gt -= 1;
                items.swap(i, gt);
            }
        }
    }
    items.swap(gt, last);
    (lt, gt + 1)
}
