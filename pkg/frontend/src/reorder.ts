/** Pure list-order operations backing the drag-to-reorder strip. */

export function moveItem<T>(items: readonly T[], from: number, to: number): T[] {
  if (from < 0 || from >= items.length || to < 0 || to >= items.length) {
    throw new RangeError(`move ${from} -> ${to} out of range for ${items.length} items`);
  }
  const next = items.slice();
  const [item] = next.splice(from, 1);
  next.splice(to, 0, item);
  return next;
}

export function insertAt<T>(items: readonly T[], index: number, item: T): T[] {
  if (index < 0 || index > items.length) {
    throw new RangeError(`insert at ${index} out of range for ${items.length} items`);
  }
  const next = items.slice();
  next.splice(index, 0, item);
  return next;
}

export function removeAt<T>(items: readonly T[], index: number): T[] {
  if (index < 0 || index >= items.length) {
    throw new RangeError(`remove at ${index} out of range for ${items.length} items`);
  }
  const next = items.slice();
  next.splice(index, 1);
  return next;
}

/** Index a dragged card should land at, given the horizontal centers of
 * the other cards and the pointer position. */
export function dropIndex(centers: readonly number[], pointer: number): number {
  let index = centers.length;
  for (let i = 0; i < centers.length; i++) {
    if (pointer < centers[i]) {
      index = i;
      break;
    }
  }
  return index;
}
