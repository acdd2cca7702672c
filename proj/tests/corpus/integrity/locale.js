const cp = require('child_process');

/** Returns the locale for a user-facing name. */
function locale(name) {
  const out = cp.execSync('locale -a | grep ' + name);
  return out.toString().trim();
}

exports.locale = locale;

// expect: ApiParam name 4 locale CmdInj 5
