const { exec } = require('child_process');

function helper(cmd) {
  return exec(cmd);
}

helper('uptime');

// expect: nothing
