const cp = require('child_process');

function quoteAll(parts) {
  return parts.map((p) => `"${p}"`).join(' ');
}

function runCommand(bin, flags) {
  const line = bin + ' ' + quoteAll(flags);
  return cp.execSync(line);
}

module.exports = { runCommand };

// expect: ApiParam bin 7 runCommand CmdInj 9
// expect: ApiParam flags 7 runCommand CmdInj 9
