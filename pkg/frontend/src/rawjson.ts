/** Byte-faithful access to fields of a JSON text.
 *
 * The workbench never re-renders a probability from a parsed float — the
 * service wrote `1.0` and `String(JSON.parse("1.0"))` would display `1` —
 * so displayed values are sliced straight out of the raw response text.
 */

export function rawAt(text: string, path: ReadonlyArray<string | number>): string {
  let at = skipWs(text, 0);
  for (const step of path) at = enter(text, at, step);
  return text.slice(at, scanValue(text, at));
}

function skipWs(s: string, i: number): number {
  while (i < s.length && (s[i] === " " || s[i] === "\t" || s[i] === "\n" || s[i] === "\r")) i++;
  return i;
}

/** End offset of the string starting at the opening quote `i`. */
function scanString(s: string, i: number): number {
  for (let j = i + 1; j < s.length; j++) {
    if (s[j] === "\\") j++;
    else if (s[j] === '"') return j + 1;
  }
  throw new Error("unterminated string in JSON text");
}

const NUMBER = /-?(?:0|[1-9]\d*)(?:\.\d+)?(?:[eE][+-]?\d+)?/y;

/** End offset of the value starting at `i`. */
function scanValue(s: string, i: number): number {
  const c = s[i];
  if (c === '"') return scanString(s, i);
  if (c === "{" || c === "[") {
    const close = c === "{" ? "}" : "]";
    let j = skipWs(s, i + 1);
    if (s[j] === close) return j + 1;
    for (;;) {
      if (c === "{") {
        j = skipWs(s, scanString(s, j));
        if (s[j] !== ":") throw new Error("malformed object in JSON text");
        j = skipWs(s, j + 1);
      }
      j = skipWs(s, scanValue(s, j));
      if (s[j] === ",") {
        j = skipWs(s, j + 1);
      } else if (s[j] === close) {
        return j + 1;
      } else {
        throw new Error("malformed container in JSON text");
      }
    }
  }
  if (s.startsWith("true", i)) return i + 4;
  if (s.startsWith("null", i)) return i + 4;
  if (s.startsWith("false", i)) return i + 5;
  NUMBER.lastIndex = i;
  const m = NUMBER.exec(s);
  if (m !== null) return i + m[0].length;
  throw new Error(`unexpected character ${JSON.stringify(c ?? "<eof>")} at offset ${i} in JSON text`);
}

/** Offset of the element/member value reached by one path step from the container at `i`. */
function enter(s: string, i: number, step: string | number): number {
  if (typeof step === "number") {
    if (s[i] !== "[") throw new Error(`expected an array for index ${step}`);
    let j = skipWs(s, i + 1);
    for (let k = 0; ; k++) {
      if (s[j] === "]") throw new Error(`array index ${step} is out of range`);
      if (k === step) return j;
      j = skipWs(s, scanValue(s, j));
      if (s[j] === ",") j = skipWs(s, j + 1);
      else if (s[j] !== "]") throw new Error("malformed array in JSON text");
    }
  }
  if (s[i] !== "{") throw new Error(`expected an object for key ${JSON.stringify(step)}`);
  let j = skipWs(s, i + 1);
  while (s[j] === '"') {
    const keyEnd = scanString(s, j);
    const key = JSON.parse(s.slice(j, keyEnd)) as string;
    j = skipWs(s, keyEnd);
    if (s[j] !== ":") throw new Error("malformed object in JSON text");
    j = skipWs(s, j + 1);
    if (key === step) return j;
    j = skipWs(s, scanValue(s, j));
    if (s[j] === ",") j = skipWs(s, j + 1);
  }
  throw new Error(`key ${JSON.stringify(step)} is not present in JSON text`);
}
