/**
 * Small Markdown renderer for the template preview pane: headings, bold,
 * inline code, fenced code blocks, lists, and frontmatter shown as a table.
 * Output is built from escaped text only.
 */

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

function inline(text: string): string {
  return escapeHtml(text)
    .replace(/\*\*([^*]+)\*\*/g, "<strong>$1</strong>")
    .replace(/`([^`]+)`/g, "<code>$1</code>");
}

export function renderMarkdown(source: string): string {
  const lines = source.split("\n");
  const html: string[] = [];
  let index = 0;
  let inList = false;

  const closeList = () => {
    if (inList) {
      html.push("</ul>");
      inList = false;
    }
  };

  // leading frontmatter block becomes a small definition table
  if (lines[0]?.trim() === "---") {
    const end = lines.findIndex((line, i) => i > 0 && line.trim() === "---");
    if (end > 0) {
      html.push('<table class="frontmatter">');
      for (const line of lines.slice(1, end)) {
        const sep = line.indexOf(":");
        if (sep > 0) {
          html.push(
            `<tr><th>${escapeHtml(line.slice(0, sep))}</th>` +
              `<td>${escapeHtml(line.slice(sep + 1).trim())}</td></tr>`,
          );
        }
      }
      html.push("</table>");
      index = end + 1;
    }
  }

  while (index < lines.length) {
    const line = lines[index];
    const fence = line.match(/^\s*```/);
    if (fence) {
      closeList();
      const block: string[] = [];
      index += 1;
      while (index < lines.length && !lines[index].match(/^\s*```/)) {
        block.push(lines[index]);
        index += 1;
      }
      index += 1;
      html.push(`<pre><code>${escapeHtml(block.join("\n"))}</code></pre>`);
      continue;
    }
    const heading = line.match(/^(#{1,6})\s+(.*\S)\s*$/);
    if (heading) {
      closeList();
      const level = heading[1].length;
      html.push(`<h${level}>${inline(heading[2])}</h${level}>`);
    } else if (/^\s*[-*]\s+/.test(line)) {
      if (!inList) {
        html.push("<ul>");
        inList = true;
      }
      html.push(`<li>${inline(line.replace(/^\s*[-*]\s+/, ""))}</li>`);
    } else if (line.trim() === "") {
      closeList();
    } else {
      closeList();
      html.push(`<p>${inline(line)}</p>`);
    }
    index += 1;
  }
  closeList();
  return html.join("\n");
}
