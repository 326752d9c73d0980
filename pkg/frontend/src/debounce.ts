// Trailing-edge debounce with last-write-wins: a burst of calls runs
// the wrapped function once, with the arguments of the final call.

export interface Debounced<A extends unknown[]> {
  (...args: A): void;
  cancel(): void;
  flush(): void;
}

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  ms: number,
): Debounced<A> {
  let timer: ReturnType<typeof setTimeout> | undefined;
  let lastArgs: A | undefined;

  const wrapped = (...args: A) => {
    lastArgs = args;
    if (timer !== undefined) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = undefined;
      const call = lastArgs as A;
      lastArgs = undefined;
      fn(...call);
    }, ms);
  };
  wrapped.cancel = () => {
    if (timer !== undefined) clearTimeout(timer);
    timer = undefined;
    lastArgs = undefined;
  };
  wrapped.flush = () => {
    if (timer === undefined) return;
    clearTimeout(timer);
    timer = undefined;
    const call = lastArgs as A;
    lastArgs = undefined;
    fn(...call);
  };
  return wrapped;
}

/**
 * Sequence numbers for in-flight preview requests. A response is
 * applied only when no newer request has been issued and nothing newer
 * has already been applied.
 */
export class RenderSequencer {
  private issued = 0;
  private applied = 0;

  begin(): number {
    return ++this.issued;
  }

  shouldApply(id: number): boolean {
    return id === this.issued && id > this.applied;
  }

  markApplied(id: number): void {
    this.applied = Math.max(this.applied, id);
  }
}
