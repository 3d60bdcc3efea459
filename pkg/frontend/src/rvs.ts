// Presentation-only parsing of resource value specification strings, used
// to group permissions into a hierarchy. Never used to decide anything:
// grants are always POSTed back as the verbatim server strings.

export interface RvsSegment {
  node: string;
  value: string; // "?" for the wildcard
}

export interface ParsedRvs {
  tree: string | null;
  segments: RvsSegment[];
}

export function parseRvsText(text: string): ParsedRvs {
  let tree: string | null = null;
  const segments: RvsSegment[] = [];
  for (const part of text.split("::")) {
    const open = part.indexOf("(");
    const close = part.lastIndexOf(")");
    if (open === -1 || close === -1 || close < open) {
      throw new Error(`unparseable segment in ${text}`);
    }
    let head = part.slice(0, open).trim();
    const colon = head.indexOf(":");
    if (colon !== -1) {
      tree = tree ?? head.slice(0, colon).trim();
      head = head.slice(colon + 1).trim();
    }
    segments.push({ node: head, value: part.slice(open + 1, close) });
  }
  return { tree, segments };
}

export function segmentLabel(segment: RvsSegment): string {
  return `${segment.node}(${segment.value})`;
}
